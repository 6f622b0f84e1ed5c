#include "haggis/demo_lang.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "haggis/util.hpp"

namespace haggis::demo {

namespace {

enum class Tok { Ident, Int, Str, Punct, Hole, Eof };

struct Token {
  Tok type;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  Lexer(const std::string& src, const std::string& path) : src_(src), path_(path) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t = next();
      out.push_back(t);
      if (t.type == Tok::Eof) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw schema_error(path_ + ":" + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg);
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) fail("unterminated block comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  Token next() {
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.type = Tok::Eof;
      return t;
    }
    char c = peek();
    if (ident_start(c)) {
      t.type = Tok::Ident;
      while (pos_ < src_.size() && ident_char(peek())) t.text.push_back(advance());
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.type = Tok::Int;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(peek())))
        t.text.push_back(advance());
      return t;
    }
    if (c == '"') {
      advance();
      t.type = Tok::Str;
      while (true) {
        if (pos_ >= src_.size()) fail("unterminated string literal");
        char d = advance();
        if (d == '"') break;
        if (d == '\\') {
          if (pos_ >= src_.size()) fail("unterminated escape");
          char e = advance();
          switch (e) {
            case 'n': t.text.push_back('\n'); break;
            case 't': t.text.push_back('\t'); break;
            case '"': t.text.push_back('"'); break;
            case '\\': t.text.push_back('\\'); break;
            default: fail(std::string("unknown escape \\") + e);
          }
        } else {
          t.text.push_back(d);
        }
      }
      return t;
    }
    if (c == '$') {
      t.type = Tok::Hole;
      t.text.push_back(advance());
      if (peek() == '(') {
        t.text.push_back(advance());
        while (pos_ < src_.size() && peek() != ')') t.text.push_back(advance());
        if (pos_ >= src_.size()) fail("unterminated $( hole");
        t.text.push_back(advance());
        return t;
      }
      if (peek() == '.' && peek(1) == '.' && peek(2) == '.') {
        t.text += "...";
        advance();
        advance();
        advance();
        return t;
      }
      while (pos_ < src_.size() && ident_char(peek())) t.text.push_back(advance());
      if (peek() == '$') t.text.push_back(advance());  // $BODY$
      if (t.text.size() == 1) fail("bare '$'");
      return t;
    }
    t.type = Tok::Punct;
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", "++", "--"};
    for (const char* p : two) {
      if (c == p[0] && peek(1) == p[1]) {
        t.text.push_back(advance());
        t.text.push_back(advance());
        return t;
      }
    }
    if (std::string("{}();,.=<>+-*/%").find(c) != std::string::npos) {
      t.text.push_back(advance());
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& src_;
  std::string path_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

RawNode make_leaf(std::string kind, std::string prop, std::string value) {
  RawNode n;
  n.kind = std::move(kind);
  n.text = value;
  n.has_text = true;
  n.props.emplace_back(std::move(prop), std::move(value));
  return n;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string path)
      : toks_(std::move(toks)), path_(std::move(path)) {}

  RawTree parse_unit() {
    RawTree t;
    t.path = path_;
    t.root.kind = "Unit";
    std::vector<RawNode> imports, body;
    while (at_kw("import")) {
      ++pos_;
      std::string name = dotted();
      expect(";");
      t.imports.push_back(name);
      imports.push_back(make_leaf("Import", "name", name));
    }
    while (!at(Tok::Eof)) body.push_back(statement());
    if (!imports.empty()) t.root.children.emplace_back("imports", std::move(imports));
    if (body.empty()) fail("empty compilation unit");
    t.root.children.emplace_back("body", std::move(body));
    return t;
  }

  std::vector<RawNode> parse_items() {
    std::vector<RawNode> out;
    while (!at(Tok::Eof)) {
      // A lone expression (no trailing ';') is a valid template.
      std::size_t save = pos_;
      if (!starts_statement()) {
        RawNode e = expression();
        if (at(Tok::Eof)) {
          out.push_back(std::move(e));
          break;
        }
        pos_ = save;
      }
      out.push_back(statement());
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = toks_[std::min(pos_, toks_.size() - 1)];
    throw schema_error(path_ + ":" + std::to_string(t.line) + ":" + std::to_string(t.col) + ": " +
                       msg);
  }

  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok ty) const { return cur().type == ty; }
  bool at_punct(const char* p) const { return cur().type == Tok::Punct && cur().text == p; }
  bool at_kw(const char* k) const { return cur().type == Tok::Ident && cur().text == k; }

  Token take() { return toks_[pos_++]; }

  void expect(const char* p) {
    if (!at_punct(p)) fail(std::string("expected '") + p + "', found '" + cur().text + "'");
    ++pos_;
  }

  std::string dotted() {
    if (!at(Tok::Ident)) fail("expected identifier");
    std::string s = take().text;
    while (at_punct(".") && toks_[pos_ + 1].type == Tok::Ident) {
      pos_ += 2;
      s += "." + toks_[pos_ - 1].text;
    }
    return s;
  }

  bool starts_statement() const {
    if (at_punct("{")) return true;
    if (cur().type != Tok::Ident) return false;
    const std::string& k = cur().text;
    return k == "if" || k == "while" || k == "for" || k == "try";
  }

  RawNode block() {
    expect("{");
    RawNode b;
    b.kind = "Block";
    std::vector<RawNode> stmts;
    while (!at_punct("}")) {
      if (at(Tok::Eof)) fail("unterminated block");
      stmts.push_back(statement());
    }
    ++pos_;
    if (!stmts.empty()) b.children.emplace_back("stmts", std::move(stmts));
    return b;
  }

  RawNode statement() {
    if (at_punct("{")) return block();
    if (at_kw("if")) return if_stmt();
    if (at_kw("while")) return while_stmt();
    if (at_kw("for")) return for_stmt();
    if (at_kw("try")) return try_stmt();
    if (at(Tok::Hole)) return hole_statement();
    if (at(Tok::Ident)) {
      // Lookahead: TYPE (IDENT|hole) -> declaration, IDENT '=' -> assignment.
      std::size_t save = pos_;
      dotted();
      bool decl = at(Tok::Ident) || at(Tok::Hole);
      pos_ = save;
      if (decl) return decl_stmt(true);
      if (toks_[pos_ + 1].type == Tok::Punct && toks_[pos_ + 1].text == "=")
        return assign_stmt(true);
    }
    RawNode e = expression();
    expect(";");
    RawNode s;
    s.kind = "ExprStmt";
    s.children.emplace_back("expr", std::vector<RawNode>{std::move(e)});
    return s;
  }

  RawNode hole_statement() {
    // "$x = e;" assigns to a hole; "$x.m();" starts an expression; otherwise
    // the hole is a whole statement by itself.
    RawNode h;
    h.kind = "Hole";
    h.props.emplace_back("tok", cur().text);
    const Token& nxt = toks_[pos_ + 1];
    if (nxt.type == Tok::Punct && nxt.text == "=") {
      pos_ += 2;
      RawNode a;
      a.kind = "Assign";
      a.children.emplace_back("target", std::vector<RawNode>{std::move(h)});
      a.children.emplace_back("value", std::vector<RawNode>{expression()});
      expect(";");
      return a;
    }
    bool exprish = nxt.type == Tok::Punct &&
                   (nxt.text == "." || nxt.text == "+" || nxt.text == "-" || nxt.text == "*" ||
                    nxt.text == "/" || nxt.text == "%" || nxt.text == "==" || nxt.text == "!=" ||
                    nxt.text == "<" || nxt.text == ">" || nxt.text == "<=" || nxt.text == ">=" ||
                    nxt.text == "&&" || nxt.text == "||" || nxt.text == "++" || nxt.text == "--");
    if (exprish) {
      RawNode e = expression();
      expect(";");
      RawNode s;
      s.kind = "ExprStmt";
      s.children.emplace_back("expr", std::vector<RawNode>{std::move(e)});
      return s;
    }
    ++pos_;
    return h;
  }

  RawNode if_stmt() {
    ++pos_;
    expect("(");
    RawNode cond = expression();
    expect(")");
    RawNode thenB = statement_block();
    RawNode n;
    n.kind = "If";
    n.children.emplace_back("cond", std::vector<RawNode>{std::move(cond)});
    n.children.emplace_back("then", std::vector<RawNode>{std::move(thenB)});
    if (at_kw("else")) {
      ++pos_;
      RawNode e = at_kw("if") ? if_stmt() : statement_block();
      n.children.emplace_back("else", std::vector<RawNode>{std::move(e)});
    }
    return n;
  }

  // Bodies must be blocks or holes; bare statements keep rendering unambiguous.
  RawNode statement_block() {
    if (at(Tok::Hole)) {
      RawNode h;
      h.kind = "Hole";
      h.props.emplace_back("tok", take().text);
      return h;
    }
    if (!at_punct("{")) fail("expected '{'");
    return block();
  }

  RawNode while_stmt() {
    ++pos_;
    expect("(");
    RawNode cond = expression();
    expect(")");
    RawNode n;
    n.kind = "While";
    n.children.emplace_back("cond", std::vector<RawNode>{std::move(cond)});
    n.children.emplace_back("body", std::vector<RawNode>{statement_block()});
    return n;
  }

  RawNode for_stmt() {
    ++pos_;
    expect("(");
    RawNode n;
    n.kind = "For";
    if (!at_punct(";")) {
      RawNode init;
      if (at(Tok::Hole)) {
        init.kind = "Hole";
        init.props.emplace_back("tok", take().text);
      } else {
        std::size_t save = pos_;
        bool decl = false;
        if (at(Tok::Ident)) {
          dotted();
          decl = at(Tok::Ident) || at(Tok::Hole);
          pos_ = save;
        }
        init = decl ? decl_stmt(false) : assign_stmt(false);
      }
      n.children.emplace_back("init", std::vector<RawNode>{std::move(init)});
    }
    expect(";");
    if (!at_punct(";")) n.children.emplace_back("cond", std::vector<RawNode>{expression()});
    expect(";");
    if (!at_punct(")")) {
      RawNode upd;
      if (at(Tok::Ident) && toks_[pos_ + 1].type == Tok::Punct && toks_[pos_ + 1].text == "=") {
        upd = assign_stmt(false);
      } else {
        upd = expression();
      }
      n.children.emplace_back("update", std::vector<RawNode>{std::move(upd)});
    }
    expect(")");
    n.children.emplace_back("body", std::vector<RawNode>{statement_block()});
    return n;
  }

  RawNode try_stmt() {
    ++pos_;
    RawNode body = statement_block();
    if (!at_kw("finally")) fail("expected 'finally'");
    ++pos_;
    RawNode n;
    n.kind = "TryFinally";
    n.children.emplace_back("body", std::vector<RawNode>{std::move(body)});
    n.children.emplace_back("fin", std::vector<RawNode>{statement_block()});
    return n;
  }

  RawNode decl_stmt(bool semi) {
    std::string type = dotted();
    RawNode name;
    if (at(Tok::Hole)) {
      name.kind = "Hole";
      name.props.emplace_back("tok", take().text);
    } else if (at(Tok::Ident)) {
      name = make_leaf("SimpleName", "id", take().text);
    } else {
      fail("expected declared name");
    }
    RawNode n;
    n.kind = "Decl";
    n.props.emplace_back("type", type);
    n.children.emplace_back("name", std::vector<RawNode>{std::move(name)});
    if (at_punct("=")) {
      ++pos_;
      n.children.emplace_back("init", std::vector<RawNode>{expression()});
    }
    if (semi) expect(";");
    return n;
  }

  RawNode assign_stmt(bool semi) {
    if (!at(Tok::Ident)) fail("expected assignment target");
    RawNode target = make_leaf("SimpleName", "id", take().text);
    expect("=");
    RawNode n;
    n.kind = "Assign";
    n.children.emplace_back("target", std::vector<RawNode>{std::move(target)});
    n.children.emplace_back("value", std::vector<RawNode>{expression()});
    if (semi) expect(";");
    return n;
  }

  RawNode expression() { return binary(0); }

  static int punct_level(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return 0;
  }

  RawNode binary(int minLevel) {
    RawNode lhs = postfix_chain();
    while (at(Tok::Punct)) {
      int level = punct_level(cur().text);
      if (level == 0 || level < minLevel) break;
      std::string op = take().text;
      RawNode rhs = binary(level + 1);
      RawNode n;
      n.kind = "Infix";
      n.props.emplace_back("op", op);
      n.children.emplace_back("lhs", std::vector<RawNode>{std::move(lhs)});
      n.children.emplace_back("rhs", std::vector<RawNode>{std::move(rhs)});
      lhs = std::move(n);
    }
    return lhs;
  }

  RawNode postfix_chain() {
    RawNode node = member_chain();
    if (at_punct("++") || at_punct("--")) {
      RawNode p;
      p.kind = "Postfix";
      p.props.emplace_back("op", take().text);
      p.children.emplace_back("operand", std::vector<RawNode>{std::move(node)});
      return p;
    }
    return node;
  }

  RawNode member_chain() {
    RawNode node = primary();
    while (at_punct(".")) {
      if (toks_[pos_ + 1].type != Tok::Ident) fail("expected member name after '.'");
      bool call = toks_[pos_ + 2].type == Tok::Punct && toks_[pos_ + 2].text == "(";
      if (call) {
        ++pos_;
        std::string name = take().text;
        ++pos_;
        RawNode c;
        c.kind = "Call";
        c.props.emplace_back("name", name);
        c.children.emplace_back("recv", std::vector<RawNode>{std::move(node)});
        auto args = arg_list();
        if (!args.empty()) c.children.emplace_back("args", std::move(args));
        node = std::move(c);
      } else if (node.kind == "SimpleName") {
        pos_ += 2;
        node.props[0].second += "." + toks_[pos_ - 1].text;
        node.text = node.props[0].second;
      } else {
        fail("field access is not supported");
      }
    }
    return node;
  }

  std::vector<RawNode> arg_list() {
    std::vector<RawNode> args;
    if (!at_punct(")")) {
      args.push_back(expression());
      while (at_punct(",")) {
        ++pos_;
        args.push_back(expression());
      }
    }
    expect(")");
    return args;
  }

  RawNode primary() {
    if (at(Tok::Int)) return make_leaf("IntLit", "value", take().text);
    if (at(Tok::Str)) return make_leaf("StrLit", "value", take().text);
    if (at(Tok::Hole)) {
      RawNode h;
      h.kind = "Hole";
      h.props.emplace_back("tok", take().text);
      return h;
    }
    if (at_kw("null")) {
      ++pos_;
      RawNode n;
      n.kind = "NullLit";
      n.text = "null";
      n.has_text = true;
      return n;
    }
    if (at_kw("new")) {
      ++pos_;
      std::string type = dotted();
      expect("(");
      RawNode n;
      n.kind = "New";
      n.props.emplace_back("type", type);
      auto args = arg_list();
      if (!args.empty()) n.children.emplace_back("args", std::move(args));
      return n;
    }
    if (at_punct("(")) {
      ++pos_;
      RawNode e = expression();
      expect(")");
      RawNode p;
      p.kind = "Paren";
      p.children.emplace_back("expr", std::vector<RawNode>{std::move(e)});
      return p;
    }
    if (at(Tok::Ident)) {
      std::string id = take().text;
      if (at_punct("(")) {
        ++pos_;
        RawNode c;
        c.kind = "Call";
        c.props.emplace_back("name", id);
        auto args = arg_list();
        if (!args.empty()) c.children.emplace_back("args", std::move(args));
        return c;
      }
      return make_leaf("SimpleName", "id", id);
    }
    fail("expected expression, found '" + cur().text + "'");
  }

  std::vector<Token> toks_;
  std::string path_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

class Renderer {
 public:
  explicit Renderer(const SymbolTable& table) : t_(table) {}

  std::string dispatch(const TreeNode& n) {
    const SymbolInfo& info = t_.info(n.symbol);
    if (!n.is_leaf() && (info.role == SymbolRole::Group || info.role == SymbolRole::BinDummy)) {
      // Fragment rooted at a list position: render the items themselves.
      bool stmtish = info.prop == "stmts" || info.prop == "body" || info.prop == "imports";
      std::vector<std::string> items;
      gather(n, stmtish, items);
      return join(items, stmtish ? " " : ", ");
    }
    if (is_stmt_kind(info)) return stmt(n);
    return expr(n);
  }

 private:
  static bool is_stmt_kind(const SymbolInfo& info) {
    if (info.role != SymbolRole::Plain) return false;
    const std::string& k = info.kind;
    return k == "Unit" || k == "Block" || k == "If" || k == "While" || k == "For" ||
           k == "TryFinally" || k == "Decl" || k == "ExprStmt" || k == "Assign";
  }

  static std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += sep;
      out += v[i];
    }
    return out;
  }

  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        default: out.push_back(c);
      }
    }
    out.push_back('"');
    return out;
  }

  const std::string* prop(const SymbolInfo& info, const char* key) const {
    for (const auto& [k, v] : info.props)
      if (k == key) return &v;
    return nullptr;
  }

  std::string hole(const TreeNode& n) const {
    const SymbolInfo& info = t_.info(n.symbol);
    switch (info.role) {
      case SymbolRole::Group: return "$" + info.prop;
      case SymbolRole::BinDummy: return "$...";
      case SymbolRole::MetaVar: return info.prop == "?" ? "$name" : "$(" + info.prop + ")";
      case SymbolRole::Plain: break;
    }
    if (info.kind == "Block") return "{ $BODY$ }";
    return "$" + info.kind;
  }

  std::string leaf(const TreeNode& n) {
    const SymbolInfo& info = t_.info(n.symbol);
    if (info.role != SymbolRole::Plain || !info.terminal) return hole(n);
    const std::string& k = info.kind;
    if (k == "SimpleName")
      if (const auto* v = prop(info, "id")) return *v;
    if (k == "IntLit")
      if (const auto* v = prop(info, "value")) return *v;
    if (k == "StrLit")
      if (const auto* v = prop(info, "value")) return quote(*v);
    if (k == "NullLit") return "null";
    if (k == "Hole")
      if (const auto* v = prop(info, "tok")) return *v;
    if (k == "Import")
      if (const auto* v = prop(info, "name")) return "import " + *v + ";";
    if (k == "Block") return "{ }";
    if (!n.leaf_text.empty()) return n.leaf_text;
    return info.text;
  }

  const TreeNode* group_of(const TreeNode& n, const char* propName) const {
    for (const auto& c : n.children) {
      const SymbolInfo& info = t_.info(c.symbol);
      if (info.role == SymbolRole::Group && info.prop == propName) return &c;
    }
    return nullptr;
  }

  // Single-child slot ("cond", "lhs", ...): absent -> "", cut -> hole.
  std::string slot(const TreeNode& n, const char* propName, bool asStmt = false) {
    const TreeNode* g = group_of(n, propName);
    if (!g) return "";
    if (g->is_leaf()) return hole(*g);
    const TreeNode& c = g->children.front();
    return asStmt ? stmt(c) : expr(c);
  }

  void gather(const TreeNode& listNode, bool stmtish, std::vector<std::string>& out) {
    for (const auto& c : listNode.children) {
      const SymbolInfo& info = t_.info(c.symbol);
      if (info.role == SymbolRole::BinDummy) {
        if (c.is_leaf())
          out.push_back("$...");
        else
          gather(c, stmtish, out);
      } else {
        out.push_back(stmtish ? stmt(c) : expr(c));
      }
    }
  }

  std::string list(const TreeNode& n, const char* propName, bool stmtish) {
    const TreeNode* g = group_of(n, propName);
    if (!g) return "";
    if (g->is_leaf()) return hole(*g);
    std::vector<std::string> items;
    gather(*g, stmtish, items);
    return join(items, stmtish ? " " : ", ");
  }

  // Declaration/assignment without the trailing ';' (for-slots).
  std::string bare(const TreeNode& n) {
    std::string s = stmt(n);
    if (s.size() && s.back() == ';') s.pop_back();
    return s;
  }

  std::string for_slot(const TreeNode& n, const char* propName) {
    const TreeNode* g = group_of(n, propName);
    if (!g) return "";
    if (g->is_leaf()) return hole(*g);
    const TreeNode& c = g->children.front();
    const SymbolInfo& info = t_.info(c.symbol);
    if (info.kind == "Decl" || info.kind == "Assign") return bare(c);
    return expr(c);
  }

  std::string stmt(const TreeNode& n) {
    if (n.is_leaf()) return leaf(n);
    const SymbolInfo& info = t_.info(n.symbol);
    const std::string& k = info.kind;
    if (info.role != SymbolRole::Plain) return expr(n);
    if (k == "Unit") {
      std::vector<std::string> items;
      if (const TreeNode* g = group_of(n, "imports")) {
        if (g->is_leaf())
          items.push_back(hole(*g));
        else
          gather(*g, true, items);
      }
      if (const TreeNode* g = group_of(n, "body")) {
        if (g->is_leaf())
          items.push_back(hole(*g));
        else
          gather(*g, true, items);
      }
      return join(items, " ");
    }
    if (k == "Block") return "{ " + list(n, "stmts", true) + " }";
    if (k == "If") {
      std::string s = "if (" + slot(n, "cond") + ") " + slot(n, "then", true);
      if (group_of(n, "else")) s += " else " + slot(n, "else", true);
      return s;
    }
    if (k == "While") return "while (" + slot(n, "cond") + ") " + slot(n, "body", true);
    if (k == "For")
      return "for (" + for_slot(n, "init") + "; " + slot(n, "cond") + "; " + for_slot(n, "update") +
             ") " + slot(n, "body", true);
    if (k == "TryFinally")
      return "try " + slot(n, "body", true) + " finally " + slot(n, "fin", true);
    if (k == "Decl") {
      const std::string* ty = prop(info, "type");
      std::string s = (ty ? *ty : "var") + " " + name_slot(n);
      if (group_of(n, "init")) s += " = " + slot(n, "init");
      return s + ";";
    }
    if (k == "ExprStmt") return slot(n, "expr") + ";";
    if (k == "Assign") return slot(n, "target") + " = " + slot(n, "value") + ";";
    return expr(n);
  }

  // In a declaration the type is already printed, so metavariable names render
  // as $name even when typed.
  std::string name_slot(const TreeNode& n) {
    const TreeNode* g = group_of(n, "name");
    if (!g) return "$name";
    if (g->is_leaf()) return hole(*g);
    const TreeNode& c = g->children.front();
    if (t_.info(c.symbol).role == SymbolRole::MetaVar && c.is_leaf()) return "$name";
    return expr(c);
  }

  std::string expr(const TreeNode& n) {
    if (n.is_leaf()) return leaf(n);
    const SymbolInfo& info = t_.info(n.symbol);
    const std::string& k = info.kind;
    if (info.role == SymbolRole::MetaVar) return expr(n.children.front());
    if (info.role != SymbolRole::Plain) return generic(n);
    if (k == "Infix") {
      const std::string* op = prop(info, "op");
      return slot(n, "lhs") + " " + (op ? *op : "?") + " " + slot(n, "rhs");
    }
    if (k == "Paren") return "(" + slot(n, "expr") + ")";
    if (k == "Postfix") {
      const std::string* op = prop(info, "op");
      return slot(n, "operand") + (op ? *op : "++");
    }
    if (k == "Call") {
      const std::string* name = prop(info, "name");
      std::string s;
      if (group_of(n, "recv")) s += slot(n, "recv") + ".";
      s += (name ? *name : "?");
      s += "(" + list(n, "args", false) + ")";
      return s;
    }
    if (k == "New") {
      const std::string* ty = prop(info, "type");
      return "new " + (ty ? *ty : "?") + "(" + list(n, "args", false) + ")";
    }
    if (is_stmt_kind(info)) return stmt(n);
    return generic(n);
  }

  std::string generic(const TreeNode& n) {
    const SymbolInfo& info = t_.info(n.symbol);
    std::vector<std::string> items;
    for (const auto& c : n.children) items.push_back(dispatch(c));
    return info.text + "(" + join(items, ", ") + ")";
  }

  const SymbolTable& t_;
};

}  // namespace

std::string render_node(const TreeNode& node, const SymbolTable& table) {
  return Renderer(table).dispatch(node);
}

RawTree parse_source(const std::string& source, const std::string& path) {
  return Parser(Lexer(source, path).run(), path).parse_unit();
}

std::vector<RawNode> parse_template(const std::string& source) {
  return Parser(Lexer(source, "<template>").run(), "<template>").parse_items();
}

std::vector<RawTree> parse_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw io_error(dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".dl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<RawTree> out;
  for (const auto& f : files)
    out.push_back(parse_source(read_file(f.string()), fs::relative(f, dir).generic_string()));
  return out;
}

}  // namespace haggis::demo
