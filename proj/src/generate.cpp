#include "haggis/generate.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "haggis/util.hpp"

namespace haggis {

namespace {
constexpr int kInfDepth = std::numeric_limits<int>::max() / 4;
}

GenerationModel::GenerationModel(const Pcfg& pcfg, const FragmentTable& table,
                                 const PriorParams& params)
    : pcfg_(&pcfg), params_(params) {
  std::unordered_map<SymbolId, std::vector<std::pair<Fragment, long>>> grouped;
  table.for_each([&](const Fragment& f, long c) { grouped[f.root()].emplace_back(f, c); });
  for (auto& [root, v] : grouped) {
    std::sort(v.begin(), v.end());
    by_root_.emplace_back(root, std::move(v));
  }
  std::sort(by_root_.begin(), by_root_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  SymbolId maxSym = pcfg.start;
  for (std::size_t i = 0; i < pcfg.rule_count(); ++i) {
    const Production& r = pcfg.production(static_cast<int>(i));
    maxSym = std::max(maxSym, r.lhs);
    for (SymbolId s : r.rhs) maxSym = std::max(maxSym, s);
  }
  min_depth_.assign(maxSym + 1, kInfDepth);
  for (SymbolId s = 0; s <= maxSym; ++s)
    if (!pcfg.is_nonterminal(s)) min_depth_[s] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pcfg.rule_count(); ++i) {
      const Production& r = pcfg.production(static_cast<int>(i));
      int d = 0;
      for (SymbolId s : r.rhs) d = std::max(d, min_depth_[s]);
      d = d >= kInfDepth ? kInfDepth : d + 1;
      if (d < min_depth_[r.lhs]) {
        min_depth_[r.lhs] = d;
        changed = true;
      }
    }
  }
  for (std::size_t i = 0; i < pcfg.rule_count(); ++i)
    if (min_depth_[pcfg.production(static_cast<int>(i)).lhs] >= kInfDepth)
      throw state_error("grammar nonterminal cannot derive a finite tree");
}

int GenerationModel::min_depth(SymbolId sym) const {
  return static_cast<std::size_t>(sym) < min_depth_.size() ? min_depth_[sym] : kInfDepth;
}

// Closes the subtree under `node` without randomness: at every nonterminal,
// take the rule whose expansion bottoms out soonest (ties: higher probability,
// then rule order).
void GenerationModel::expand_min_depth(TreeNode& node) const {
  if (!pcfg_->is_nonterminal(node.symbol) || !node.children.empty()) return;
  auto [lo, hi] = pcfg_->rules_for(node.symbol);
  int best = -1;
  int bestDepth = kInfDepth + 1;
  double bestProb = -1.0;
  for (int i = lo; i < hi; ++i) {
    int d = 0;
    for (SymbolId s : pcfg_->production(i).rhs) d = std::max(d, min_depth(s));
    double p = pcfg_->prob(i);
    if (d < bestDepth || (d == bestDepth && p > bestProb)) {
      best = i;
      bestDepth = d;
      bestProb = p;
    }
  }
  if (best < 0) throw state_error("nonterminal has no rules");
  const Production& rule = pcfg_->production(best);
  node.children.resize(rule.rhs.size());
  for (std::size_t i = 0; i < rule.rhs.size(); ++i) {
    node.children[i].symbol = rule.rhs[i];
    expand_min_depth(node.children[i]);
  }
}

TreeNode GenerationModel::sample_tree(Rng& rng, int maxDepth) const {
  TreeNode root;
  root.symbol = pcfg_->start;
  root.z = true;

  std::deque<std::pair<TreeNode*, int>> frontier;  // site, depth
  frontier.emplace_back(&root, 0);
  while (!frontier.empty()) {
    auto [site, depth] = frontier.front();
    frontier.pop_front();
    if (depth >= maxDepth) {
      expand_min_depth(*site);
      continue;
    }

    long tot = 0;
    const std::vector<std::pair<Fragment, long>>* frags = nullptr;
    auto it = std::lower_bound(by_root_.begin(), by_root_.end(), site->symbol,
                               [](const auto& e, SymbolId s) { return e.first < s; });
    if (it != by_root_.end() && it->first == site->symbol) {
      frags = &it->second;
      for (const auto& [f, c] : *frags) tot += c;
    }

    Fragment chosen;
    double r = rng.uniform01() * (static_cast<double>(tot) + params_.alpha);
    bool fromTable = false;
    if (frags) {
      double cum = 0.0;
      for (const auto& [f, c] : *frags) {
        cum += static_cast<double>(c);
        if (r < cum) {
          chosen = f;
          fromTable = true;
          break;
        }
      }
    }
    if (!fromTable) chosen = sample_fragment_from_prior(site->symbol, *pcfg_, params_, rng);

    TreeNode sub = fragment_to_tree(chosen);
    site->children = std::move(sub.children);
    std::function<void(TreeNode&, int)> collect = [&](TreeNode& n, int d) {
      if (n.is_leaf()) {
        if (pcfg_->is_nonterminal(n.symbol)) {
          n.z = true;
          frontier.emplace_back(&n, d);
        }
        return;
      }
      for (auto& c : n.children) collect(c, d + 1);
    };
    for (auto& c : site->children) collect(c, depth + 1);
  }
  return root;
}

SourceTree sample_tree_from_ptsg(const Pcfg& pcfg, const FragmentTable& table,
                                 const PriorParams& params, Rng& rng, int maxDepth) {
  GenerationModel model(pcfg, table, params);
  SourceTree t;
  t.root = model.sample_tree(rng, maxDepth);
  return t;
}

bool valid_derivation(const TreeNode& root, const Pcfg& pcfg) {
  bool ok = true;
  for_each_node(root, [&](const TreeNode& n) {
    if (n.children.empty()) {
      if (pcfg.is_nonterminal(n.symbol)) ok = false;
      return;
    }
    Production p;
    p.lhs = n.symbol;
    for (const auto& c : n.children) p.rhs.push_back(c.symbol);
    if (pcfg.find(p) < 0) ok = false;
  });
  return ok;
}

}  // namespace haggis
