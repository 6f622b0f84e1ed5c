#include "haggis/fragment.hpp"

#include <cmath>

#include "haggis/util.hpp"

namespace haggis {

int Fragment::productions() const {
  int n = 0;
  for (std::size_t i = 1; i < code.size(); i += 2)
    if (code[i] > 0) ++n;
  return n;
}

namespace {

void encode(const TreeNode& n, bool expand, std::vector<std::int32_t>& out) {
  out.push_back(n.symbol);
  if (!expand || n.is_leaf()) {
    out.push_back(0);
    return;
  }
  out.push_back(static_cast<std::int32_t>(n.children.size()));
  for (const auto& c : n.children) encode(c, !c.z, out);
}

}  // namespace

Fragment fragment_at(const TreeNode& root) {
  Fragment f;
  encode(root, true, f.code);
  return f;
}

namespace {

TreeNode decode(const Fragment& f, std::size_t& pos) {
  TreeNode n;
  n.symbol = f.code[pos];
  std::int32_t arity = f.code[pos + 1];
  pos += 2;
  n.children.reserve(arity);
  for (std::int32_t i = 0; i < arity; ++i) n.children.push_back(decode(f, pos));
  return n;
}

}  // namespace

TreeNode fragment_to_tree(const Fragment& f) {
  if (f.empty()) throw state_error("empty fragment");
  std::size_t pos = 0;
  TreeNode t = decode(f, pos);
  if (pos != f.code.size()) throw state_error("fragment code has trailing data");
  return t;
}

Fragment fragment_from_tree(const TreeNode& t) {
  Fragment f;
  std::function<void(const TreeNode&)> rec = [&](const TreeNode& n) {
    f.code.push_back(n.symbol);
    f.code.push_back(static_cast<std::int32_t>(n.children.size()));
    for (const auto& c : n.children) rec(c);
  };
  rec(t);
  return f;
}

int content_node_count(const Fragment& f, const SymbolTable& table) {
  int n = 0;
  for (std::size_t i = 0; i < f.code.size(); i += 2) {
    SymbolRole role = table.info(f.code[i]).role;
    if (role != SymbolRole::Group && role != SymbolRole::BinDummy) ++n;
  }
  return n;
}

double fragment_log_prior(const Fragment& f, const Pcfg& pcfg, const PriorParams& params) {
  if (f.empty()) throw state_error("empty fragment");
  double sum = 0.0;
  int nprod = 0;
  std::size_t pos = 0;
  std::vector<SymbolId> rhs;
  std::function<void()> rec = [&]() {
    SymbolId sym = f.code[pos];
    std::int32_t arity = f.code[pos + 1];
    pos += 2;
    if (arity == 0) return;
    rhs.clear();
    for (std::size_t i = pos, seen = 0; seen < static_cast<std::size_t>(arity); ++seen) {
      rhs.push_back(f.code[i]);
      // skip over this child's subtree to find the next sibling's symbol
      std::size_t depth = 1;
      while (depth > 0) {
        std::int32_t a = f.code[i + 1];
        i += 2;
        depth += static_cast<std::size_t>(a);
        --depth;
      }
    }
    int idx = pcfg.find(sym, rhs);
    if (idx < 0) throw state_error("fragment uses a production unknown to the grammar");
    sum += pcfg.log_prob(idx);
    ++nprod;
    for (std::int32_t i = 0; i < arity; ++i) rec();
  };
  rec();
  double p = params.p_stop;
  double geo = std::log(p);
  if (nprod > 1) geo += (nprod - 1) * std::log1p(-p);
  return geo + sum;
}

Fragment sample_fragment_from_prior(SymbolId root, const Pcfg& pcfg, const PriorParams& params,
                                    Rng& rng) {
  if (!pcfg.is_nonterminal(root))
    throw state_error("sample_fragment_from_prior: root symbol is terminal");

  TreeNode top;
  top.symbol = root;
  std::vector<TreeNode*> frontier;

  auto expand = [&](TreeNode* n) {
    int r = pcfg.sample_rule(n->symbol, rng);
    const Production& p = pcfg.production(r);
    n->children.reserve(p.rhs.size());
    for (SymbolId s : p.rhs) {
      TreeNode c;
      c.symbol = s;
      n->children.push_back(std::move(c));
    }
    // Child vectors never grow after this, so pointers into them stay valid.
    for (auto& c : n->children)
      if (pcfg.is_nonterminal(c.symbol)) frontier.push_back(&c);
  };

  expand(&top);
  while (!frontier.empty()) {
    if (rng.bernoulli(params.p_stop)) break;
    std::size_t i = static_cast<std::size_t>(rng.below(frontier.size()));
    TreeNode* site = frontier[i];
    frontier[i] = frontier.back();
    frontier.pop_back();
    expand(site);
  }
  return fragment_at(top);
}

}  // namespace haggis
