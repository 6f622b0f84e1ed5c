#pragma once

#include <cstdint>

#include "haggis/fragment.hpp"
#include "haggis/grammar.hpp"
#include "haggis/rng.hpp"
#include "haggis/sampler.hpp"
#include "haggis/tree.hpp"

namespace haggis {

// Deterministic per-root snapshot of a FragmentTable for generation. Iteration
// order is fixed (fragments sorted per root) so identical seeds give identical
// trees regardless of hash map layout.
class GenerationModel {
 public:
  GenerationModel(const Pcfg& pcfg, const FragmentTable& table, const PriorParams& params);

  // Draws one tree from the posterior predictive: at each frontier
  // nonterminal, an existing fragment with probability count/(total+alpha),
  // otherwise a fresh draw from the fragment prior. Frontier is expanded
  // breadth-first; sites at depth >= maxDepth are closed with the greedy
  // minimum-depth rule instead of a random draw. Fragment roots are marked
  // with z=1 in the result.
  TreeNode sample_tree(Rng& rng, int maxDepth = 40) const;

 private:
  void expand_min_depth(TreeNode& node) const;
  int min_depth(SymbolId sym) const;

  const Pcfg* pcfg_;
  const PriorParams params_;
  std::vector<std::pair<SymbolId, std::vector<std::pair<Fragment, long>>>> by_root_;
  std::vector<int> min_depth_;  // by symbol id; terminals 1
};

SourceTree sample_tree_from_ptsg(const Pcfg& pcfg, const FragmentTable& table,
                                 const PriorParams& params, Rng& rng, int maxDepth = 40);

// True when every internal node of the tree uses a production known to the
// grammar.
bool valid_derivation(const TreeNode& root, const Pcfg& pcfg);

}  // namespace haggis
