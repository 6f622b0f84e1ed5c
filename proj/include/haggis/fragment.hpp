#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "haggis/grammar.hpp"
#include "haggis/rng.hpp"
#include "haggis/tree.hpp"

namespace haggis {

// A fragment is stored as its preorder (symbol, arity) sequence. Arity 0 marks
// a leaf: either a terminal or a frontier nonterminal (substitution site).
// Internal nodes carry their full production, so the encoding is canonical and
// equality/hashing are plain vector operations.
struct Fragment {
  std::vector<std::int32_t> code;

  bool operator==(const Fragment&) const = default;
  bool operator<(const Fragment& o) const { return code < o.code; }
  bool empty() const { return code.empty(); }
  SymbolId root() const { return code[0]; }
  int productions() const;
  int node_count() const { return static_cast<int>(code.size() / 2); }
};

struct FragmentHash {
  std::size_t operator()(const Fragment& f) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t v : f.code) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// The fragment rooted at this node under the current z flags: children with
// z=0 are expanded, children with z=1 become frontier leaves.
Fragment fragment_at(const TreeNode& root);

// Decodes into a plain tree (symbols only) for rendering and matching.
TreeNode fragment_to_tree(const Fragment& f);
Fragment fragment_from_tree(const TreeNode& t);

// Nodes that count as idiom content: group heads and binarization dummies are
// encoding artifacts and excluded.
int content_node_count(const Fragment& f, const SymbolTable& table);

// log P_0(T) = log P_geom(|T|, p_stop) + sum log P_ML(r), |T| = productions.
double fragment_log_prior(const Fragment& f, const Pcfg& pcfg, const PriorParams& params);

// Generative reading of the prior: expand the root with P_ML, then repeatedly
// stop with probability p_stop or expand a uniformly random frontier
// nonterminal (forced stop once the frontier is empty).
Fragment sample_fragment_from_prior(SymbolId root, const Pcfg& pcfg, const PriorParams& params,
                                    Rng& rng);

}  // namespace haggis
