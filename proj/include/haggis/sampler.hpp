#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "haggis/fragment.hpp"
#include "haggis/grammar.hpp"
#include "haggis/rng.hpp"
#include "haggis/tree.hpp"

namespace haggis {

// Collapsed DP state: per root nonterminal, counts of fragments currently cut
// out of the corpus by the z flags.
class FragmentTable {
 public:
  void add(const Fragment& f, long delta = 1);
  long count(const Fragment& f) const;
  long total(SymbolId root) const;

  const std::unordered_map<Fragment, long, FragmentHash>* fragments_of(SymbolId root) const;

  bool operator==(const FragmentTable& o) const;
  std::size_t distinct() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [root, m] : by_root_)
      for (const auto& [frag, cnt] : m) fn(frag, cnt);
  }

 private:
  std::unordered_map<SymbolId, std::unordered_map<Fragment, long, FragmentHash>> by_root_;
  std::vector<long> totals_;
};

struct SamplerState {
  std::vector<SourceTree>* corpus = nullptr;  // not owned; z flags mutated
  const Pcfg* pcfg = nullptr;
  PriorParams params;
  Rng rng;
  std::uint64_t seed = 0;
  long iteration = 0;
  bool random_scan = false;
  FragmentTable table;

  struct Site {
    int tree;
    int node;  // preorder index
  };
  std::vector<TreeIndex> index;  // per tree
  std::vector<Site> order;       // eligible sites, post-order within trees
};

// initPolicy: "all-boundaries" or "bernoulli(q)" with q in [0,1]. The default
// starts from whole-tree fragments: recurring structure is visible to the
// collapsed predictive from the first sweep, and one-off trees melt into
// smaller shared pieces, whereas dense-boundary inits entrench partial
// segmentations that single-site flips cannot tunnel out of.
SamplerState init_state(std::vector<SourceTree>& corpus, const Pcfg& pcfg,
                        const PriorParams& params, std::uint64_t seed,
                        const std::string& initPolicy = "bernoulli(0)");

// Rebuilds the table from scratch; used for consistency checks and resume.
FragmentTable recount(const std::vector<SourceTree>& corpus);

// Posterior predictive log probability of drawing `f` at a substitution site
// for its root symbol, given the current table (Eq. 3 in log space).
double log_posterior_predictive(const SamplerState& state, const Fragment& f);

// P(z=0) for an eligible site. Precondition: the table excludes the fragments
// currently covering the site's parent (and the site itself when z=1).
double merge_probability(SamplerState& state, int tree, int node);

struct SamplerKernel {
  virtual ~SamplerKernel() = default;
  virtual void sweep(SamplerState& state) = 0;
  virtual std::string name() const = 0;
};

// Collapsed Gibbs: resamples every eligible z once per sweep.
class GibbsKernel : public SamplerKernel {
 public:
  void sweep(SamplerState& state) override;
  std::string name() const override { return "gibbs"; }
};

struct PosteriorSample {
  long iteration = 0;
  std::vector<std::pair<Fragment, int>> fragments;  // fragment, tree index
};

// Takes the current corpus segmentation as a sample.
PosteriorSample snapshot(const SamplerState& state);

// Runs `iterations` sweeps; samples iterations in (burnIn, iterations] at the
// given stride.
std::vector<PosteriorSample> run_chain(SamplerState& state, int iterations, int burnIn,
                                       int sampleEvery = 1, SamplerKernel* kernel = nullptr);

// Resume form: sweeps from state.iteration (absolute) up to `iterations`
// total, keeping the same absolute sampling schedule as an uninterrupted
// run_chain. Equal to run_chain on a fresh state.
std::vector<PosteriorSample> continue_chain(SamplerState& state, int iterations, int burnIn,
                                            int sampleEvery = 1,
                                            SamplerKernel* kernel = nullptr);

void save_checkpoint(const std::string& path, const SamplerState& state);

// Restores z flags, rng and iteration onto the given corpus (which must match
// the checkpoint's tree shapes); the table is rebuilt by recount.
SamplerState load_checkpoint(const std::string& path, std::vector<SourceTree>& corpus,
                             const Pcfg& pcfg);

}  // namespace haggis
