#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "haggis/rng.hpp"
#include "haggis/transform.hpp"
#include "haggis/tree.hpp"
#include "haggis/util.hpp"
#include "helpers.hpp"

using namespace haggis;

namespace {

RawNode raw(std::string kind, std::vector<std::pair<std::string, std::string>> props = {},
            std::vector<std::pair<std::string, std::vector<RawNode>>> children = {}) {
  RawNode n;
  n.kind = std::move(kind);
  n.props = std::move(props);
  n.children = std::move(children);
  return n;
}

RawNode leaf(std::string kind, std::string text,
             std::vector<std::pair<std::string, std::string>> props = {}) {
  RawNode n = raw(std::move(kind), std::move(props));
  n.text = std::move(text);
  n.has_text = true;
  return n;
}

TransformOptions plain_options() {
  TransformOptions opt;
  opt.insert_metavars = false;
  return opt;
}

std::size_t count_symbol(const TreeNode& root, SymbolId sym) {
  std::size_t c = 0;
  for_each_node(root, [&](const TreeNode& n) { c += n.symbol == sym; });
  return c;
}

std::multiset<std::string> leaf_texts(const TreeNode& root) {
  std::multiset<std::string> out;
  for_each_node(root, [&](const TreeNode& n) {
    if (!n.leaf_text.empty()) out.insert(n.leaf_text);
  });
  return out;
}

void collect_raw_texts(const RawNode& n, std::multiset<std::string>& out) {
  if (n.has_text && !n.text.empty()) out.insert(n.text);
  for (const auto& [prop, kids] : n.children)
    for (const auto& kid : kids) collect_raw_texts(kid, out);
}

// Random raw tree over a tiny kind alphabet; text only on leaves.
RawNode random_raw(Rng& rng, int depth) {
  static const char* kinds[] = {"A", "B", "C"};
  static const char* props[] = {"p", "q"};
  RawNode n = raw(kinds[rng.below(3)]);
  if (rng.uniform01() < 0.5) n.props.emplace_back(props[rng.below(2)], std::to_string(rng.below(4)));
  if (depth <= 0 || rng.uniform01() < 0.3) {
    n.text = "t" + std::to_string(rng.below(5));
    n.has_text = true;
    return n;
  }
  int groups = 1 + static_cast<int>(rng.below(2));
  for (int g = 0; g < groups; ++g) {
    std::vector<RawNode> kids;
    int kcount = static_cast<int>(rng.below(6));  // sometimes empty, sometimes wide
    for (int k = 0; k < kcount; ++k) kids.push_back(random_raw(rng, depth - 1));
    n.children.emplace_back(g == 0 ? "xs" : "ys", std::move(kids));
  }
  return n;
}

}  // namespace

TEST_CASE("symbolize canonicalizes kind and properties") {
  SymbolTable table;
  TreeNode a = symbolize(raw("Call", {{"name", "f"}, {"op", "+"}}), table);
  TreeNode b = symbolize(raw("Call", {{"op", "+"}, {"name", "f"}}), table);
  TreeNode c = symbolize(raw("Call", {{"name", "g"}, {"op", "+"}}), table);
  TreeNode d = symbolize(raw("Call"), table);
  CHECK(a.symbol == b.symbol);        // prop order is irrelevant
  CHECK(a.symbol != c.symbol);        // prop values are identity
  CHECK(a.symbol != d.symbol);        // present vs absent props differ
  CHECK(table.info(a.symbol).category == "Call");
  CHECK(table.info(a.symbol).text == "Call[name=f,op=+]");
}

TEST_CASE("symbolize inserts one group head per non-empty property group") {
  SymbolTable table;
  RawNode n = raw("If", {}, {{"cond", {leaf("Lit", "1")}},
                             {"then", {raw("Block"), raw("Block")}},
                             {"else", {}}});
  TreeNode t = symbolize(n, table);
  REQUIRE(t.children.size() == 2);  // empty "else" group dropped
  CHECK(table.info(t.children[0].symbol).text == "If::cond");
  CHECK(table.info(t.children[0].symbol).role == SymbolRole::Group);
  CHECK(table.info(t.children[1].symbol).text == "If::then");
  CHECK(t.children[0].children.size() == 1);
  CHECK(t.children[1].children.size() == 2);
  CHECK(t.children[0].children[0].leaf_text == "1");
  CHECK_FALSE(table.info(t.symbol).terminal);
  CHECK(table.info(t.children[0].children[0].symbol).terminal);
}

TEST_CASE("binarize rewrites wide groups into right-leaning dummy chains") {
  SymbolTable table;
  RawNode n = raw("Block", {},
                  {{"stmts", {leaf("S", "1"), leaf("S", "2"), leaf("S", "3"), leaf("S", "4")}}});
  TreeNode t = symbolize(n, table);
  binarize(t, table);

  const TreeNode& g = t.children[0];
  REQUIRE(g.children.size() == 2);
  CHECK(g.children[0].leaf_text == "1");
  const TreeNode& d1 = g.children[1];
  CHECK(table.info(d1.symbol).text == "Block::stmts...");
  CHECK(table.info(d1.symbol).role == SymbolRole::BinDummy);
  REQUIRE(d1.children.size() == 2);
  CHECK(d1.children[0].leaf_text == "2");
  const TreeNode& d2 = d1.children[1];
  CHECK(d2.symbol == d1.symbol);
  REQUIRE(d2.children.size() == 2);
  CHECK(d2.children[0].leaf_text == "3");
  CHECK(d2.children[1].leaf_text == "4");
}

TEST_CASE("binarize leaves groups of at most two children alone") {
  SymbolTable table;
  RawNode n = raw("Block", {}, {{"stmts", {leaf("S", "1"), leaf("S", "2")}}});
  TreeNode t = symbolize(n, table);
  TreeNode before = t;
  binarize(t, table);
  CHECK(t == before);
}

TEST_CASE("debinarize inverts binarize on random trees") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    SymbolTable table;
    TreeNode t = symbolize(random_raw(rng, 4), table);
    TreeNode original = t;
    binarize(t, table);

    // Invariant: every dummy has exactly two children.
    for_each_node(t, [&](const TreeNode& n) {
      if (table.info(n.symbol).role == SymbolRole::BinDummy) CHECK(n.children.size() == 2);
      if (table.info(n.symbol).role == SymbolRole::Group) CHECK(n.children.size() <= 2);
    });

    debinarize(t, table);
    CHECK(t == original);
  }
}

TEST_CASE("metavariables wrap name leaves with declared or unknown type") {
  SymbolTable table;
  RawNode program =
      raw("Block", {},
          {{"stmts",
            {raw("Decl", {{"type", "int"}}, {{"name", {leaf("SimpleName", "x", {{"id", "x"}})}}}),
             raw("Assign", {},
                 {{"lhs", {leaf("SimpleName", "x", {{"id", "x"}})}},
                  {"rhs", {leaf("SimpleName", "y", {{"id", "y"}})}}}),
             leaf("Lit", "42")}}});
  TransformOptions opt = plain_options();
  opt.insert_metavars = true;
  SourceTree t = transform_tree({"p.dl", {}, program}, opt, table);

  SymbolId mvInt = table.find("MetaVariable[type=int]");
  SymbolId mvUnknown = table.find("MetaVariable[type=?]");
  REQUIRE(mvInt >= 0);
  REQUIRE(mvUnknown >= 0);
  CHECK(count_symbol(t.root, mvInt) == 2);      // declaration site and use of x
  CHECK(count_symbol(t.root, mvUnknown) == 1);  // y has no declaration
  CHECK(table.info(mvInt).role == SymbolRole::MetaVar);

  // Wrapped leaves keep their identity below the wrapper; literals stay bare.
  for_each_node(t.root, [&](const TreeNode& n) {
    if (n.symbol == mvInt || n.symbol == mvUnknown) {
      REQUIRE(n.children.size() == 1);
      CHECK(table.info(n.children[0].symbol).category == "SimpleName");
    }
    if (table.info(n.symbol).category == "Lit") CHECK(n.is_leaf());
  });
}

TEST_CASE("import subtrees are removed and their names recorded") {
  SymbolTable table;
  RawNode program = raw(
      "Block", {},
      {{"stmts",
        {raw("Import", {{"name", "android.db"}}), raw("Import", {{"name", "util.io"}}),
         raw("Import", {{"name", "android.db"}}),  // duplicate collapses
         leaf("Lit", "1")}}});
  SourceTree t = transform_tree({"p.dl", {}, program}, plain_options(), table);

  CHECK(t.imports == std::vector<std::string>{"android.db", "util.io"});
  for_each_node(t.root, [&](const TreeNode& n) {
    CHECK(table.info(n.symbol).category != "Import");
    if (table.info(n.symbol).role == SymbolRole::BinDummy) CHECK(n.children.size() == 2);
  });
  CHECK(leaf_texts(t.root) == std::multiset<std::string>{"1"});
}

TEST_CASE("a tree that is all imports has no content") {
  SymbolTable table;
  RawNode program = raw("Block", {}, {{"stmts", {raw("Import", {{"name", "a"}})}}});
  CHECK_THROWS_WITH_AS(transform_tree({"p.dl", {}, program}, plain_options(), table),
                       "tree p.dl: no content after transform", Error);
}

TEST_CASE("freeze list pins categories and starred children") {
  SymbolTable table;
  RawNode program =
      raw("Block", {},
          {{"stmts",
            {raw("Call", {{"name", "f"}},
                 {{"args", {leaf("Lit", "1"), leaf("Lit", "2"), leaf("Lit", "3"),
                            leaf("Lit", "4")}}}),
             raw("If", {}, {{"cond", {leaf("Lit", "1")}}, {"then", {leaf("Lit", "2")}}})}}});
  TransformOptions opt = plain_options();
  opt.freeze_categories = {"Call::args", "Call::args/*", "If::cond"};
  SourceTree t = transform_tree({"p.dl", {}, program}, opt, table);

  bool sawArgsHead = false, sawDummy = false, sawCondHead = false, sawThenHead = false;
  for_each_node(t.root, [&](const TreeNode& n) {
    const SymbolInfo& info = table.info(n.symbol);
    if (info.category == "Call::args" && info.role == SymbolRole::Group) {
      CHECK(n.frozen);
      sawArgsHead = true;
      // starred entry freezes everything under the head, through dummies
      for_each_node(n, [&](const TreeNode& m) {
        CHECK(m.frozen);
        if (table.info(m.symbol).role == SymbolRole::BinDummy) sawDummy = true;
      });
    }
    if (info.category == "If::cond") {
      sawCondHead = true;
      CHECK(n.frozen);
      // no starred entry: the condition subtree itself stays live
      for (const auto& c : n.children) CHECK_FALSE(c.frozen);
    }
    if (info.category == "If::then") {
      sawThenHead = true;
      CHECK_FALSE(n.frozen);
    }
  });
  CHECK(sawArgsHead);
  CHECK(sawDummy);
  CHECK(sawCondHead);
  CHECK(sawThenHead);
}

TEST_CASE("boundary flags are sane after transform") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    SymbolTable table;
    RawNode program = raw("Root", {}, {{"xs", {random_raw(rng, 3), random_raw(rng, 3)}}});
    TransformOptions opt = plain_options();
    if (trial % 2) opt.freeze_categories = {"A", "B::xs", "C/*"};
    SourceTree t = transform_tree({"p.dl", {}, program}, opt, table);

    CHECK(t.root.z);
    CHECK_FALSE(t.root.frozen);
    for_each_node(t.root, [&](const TreeNode& n) {
      if (n.frozen) CHECK_FALSE(n.z);   // frozen nodes are never boundaries
      if (n.is_leaf()) CHECK_FALSE(n.z);  // leaves are never boundaries
    });
    if (opt.freeze_categories.empty()) {
      std::size_t frozen = 0;
      for_each_node(t.root, [&](const TreeNode& n) { frozen += n.frozen; });
      CHECK(frozen == 0);
    }
  }
}

TEST_CASE("transform preserves leaf text outside pruned subtrees") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    SymbolTable table;
    RawNode program = raw("Root", {}, {{"xs", {random_raw(rng, 4)}}});
    std::multiset<std::string> before;
    collect_raw_texts(program, before);
    TransformOptions opt = plain_options();
    opt.prune_categories = {};  // nothing matches the A/B/C alphabet anyway
    SourceTree t = transform_tree({"p.dl", {}, program}, opt, table);
    CHECK(leaf_texts(t.root) == before);
  }
}

TEST_CASE("parallel corpus transform matches the serial path exactly") {
  Rng rng(4242);
  std::vector<RawTree> corpus;
  for (int i = 0; i < 40; ++i) {
    RawTree t;
    t.path = "f" + std::to_string(i) + ".dl";
    t.root = raw("Root", {}, {{"xs", {random_raw(rng, 4), random_raw(rng, 3)}}});
    corpus.push_back(std::move(t));
  }

  TransformOptions opt = plain_options();
  opt.insert_metavars = true;
  opt.freeze_categories = {"A::xs", "B/*"};

  SymbolTable serialTable, parallelTable;
  auto serial = transform_corpus(corpus, opt, serialTable, /*parallel=*/false);
  auto parallel = transform_corpus(corpus, opt, parallelTable, /*parallel=*/true);

  REQUIRE(serial.size() == parallel.size());
  REQUIRE(serialTable.size() == parallelTable.size());
  for (std::size_t s = 0; s < serialTable.size(); ++s)
    CHECK(serialTable.info(static_cast<SymbolId>(s)).text ==
          parallelTable.info(static_cast<SymbolId>(s)).text);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].root == parallel[i].root);
    CHECK(serial[i].imports == parallel[i].imports);
  }
}

TEST_CASE("corpora must share one root symbol") {
  SymbolTable table;
  std::vector<RawTree> corpus;
  corpus.push_back({"a.dl", {}, raw("Root", {}, {{"xs", {leaf("Lit", "1")}}})});
  corpus.push_back({"b.dl", {}, raw("Other", {}, {{"xs", {leaf("Lit", "1")}}})});
  CHECK_THROWS_AS(transform_corpus(corpus, plain_options(), table), Error);
}

TEST_CASE("demo defaults freeze the statement-expression layer") {
  TransformOptions opt = default_demo_options();
  for (const char* entry : {"Call::args", "If::cond", "For::update/*", "Infix", "Decl"})
    CHECK(std::find(opt.freeze_categories.begin(), opt.freeze_categories.end(), entry) !=
          opt.freeze_categories.end());
  CHECK(opt.prune_categories == std::vector<std::string>{"Import"});
  CHECK(opt.insert_metavars);
}
