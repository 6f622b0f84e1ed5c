#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "haggis/grammar.hpp"
#include "haggis/rng.hpp"
#include "haggis/symbols.hpp"
#include "haggis/tree.hpp"

namespace testutil {

// Toy arithmetic grammar used across the suite:
//   E -> T + T (0.7) | T (0.3)
//   T -> F * F (0.6) | F (0.4)
//   F -> ( E ) (0.1) | id (0.9)
struct ToyGrammar {
  haggis::SymbolTable table;
  haggis::SymbolId E, T, F, plus, star, lparen, rparen, id;
  haggis::Pcfg pcfg;

  explicit ToyGrammar(long scale = 10) {
    E = table.intern_node("E", {});
    T = table.intern_node("T", {});
    F = table.intern_node("F", {});
    plus = table.intern_node("+", {});
    star = table.intern_node("*", {});
    lparen = table.intern_node("(", {});
    rparen = table.intern_node(")", {});
    id = table.intern_node("id", {});
    table.note_internal(E);
    table.note_internal(T);
    table.note_internal(F);
    pcfg.start = E;
    pcfg.add_rule({E, {T, plus, T}}, 7 * scale);
    pcfg.add_rule({E, {T}}, 3 * scale);
    pcfg.add_rule({T, {F, star, F}}, 6 * scale);
    pcfg.add_rule({T, {F}}, 4 * scale);
    pcfg.add_rule({F, {lparen, E, rparen}}, 1 * scale);
    pcfg.add_rule({F, {id}}, 9 * scale);
    pcfg.finalize();
  }

  haggis::TreeNode node(haggis::SymbolId sym, std::vector<haggis::TreeNode> kids = {}) const {
    haggis::TreeNode n;
    n.symbol = sym;
    n.children = std::move(kids);
    return n;
  }
};

inline haggis::TreeNode tn(haggis::SymbolId sym, std::vector<haggis::TreeNode> kids = {}) {
  haggis::TreeNode n;
  n.symbol = sym;
  n.children = std::move(kids);
  return n;
}

inline haggis::SourceTree source_tree(haggis::TreeNode root, std::string path = "t.dl",
                                      std::vector<std::string> imports = {}) {
  haggis::SourceTree t;
  t.path = std::move(path);
  t.imports = std::move(imports);
  t.root = std::move(root);
  t.root.z = true;
  return t;
}

// Random derivation from a pcfg, depth-capped by forcing the first rule
// (grammars used in tests make that finite).
inline haggis::TreeNode random_derivation(const haggis::Pcfg& pcfg, haggis::SymbolId sym,
                                          haggis::Rng& rng, int depth, int maxDepth) {
  haggis::TreeNode n;
  n.symbol = sym;
  if (!pcfg.is_nonterminal(sym)) return n;
  int rule;
  if (depth >= maxDepth) {
    int best = -1;
    std::size_t bestLen = SIZE_MAX;
    auto [b, e] = pcfg.rules_for(sym);
    for (int i = b; i < e; ++i) {
      std::size_t len = pcfg.production(i).rhs.size();
      if (len < bestLen) {
        bestLen = len;
        best = i;
      }
    }
    rule = best;
  } else {
    rule = pcfg.sample_rule(sym, rng);
  }
  for (haggis::SymbolId c : pcfg.production(rule).rhs)
    n.children.push_back(random_derivation(pcfg, c, rng, depth + 1, maxDepth));
  return n;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "haggis-test-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

// Runs the CLI under test (HAGGIS_BIN) with the given argument string.
// `env_prefix` may carry VAR=value assignments for the child process.
inline CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const char* bin = std::getenv("HAGGIS_BIN");
  if (!bin) throw std::runtime_error("HAGGIS_BIN not set");
  std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + std::string(bin) + " " +
                    args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  CmdResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace testutil
