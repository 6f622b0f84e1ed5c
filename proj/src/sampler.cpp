#include "haggis/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>

#include "haggis/util.hpp"

namespace haggis {

void FragmentTable::add(const Fragment& f, long delta) {
  SymbolId r = f.root();
  if (static_cast<std::size_t>(r) >= totals_.size()) totals_.resize(r + 1, 0);
  auto& m = by_root_[r];
  long& c = m[f];
  c += delta;
  totals_[r] += delta;
  if (c < 0 || totals_[r] < 0) throw state_error("fragment count went negative");
  if (c == 0) {
    m.erase(f);
    if (m.empty()) by_root_.erase(r);
  }
}

long FragmentTable::count(const Fragment& f) const {
  auto it = by_root_.find(f.root());
  if (it == by_root_.end()) return 0;
  auto jt = it->second.find(f);
  return jt == it->second.end() ? 0 : jt->second;
}

long FragmentTable::total(SymbolId root) const {
  if (root < 0 || static_cast<std::size_t>(root) >= totals_.size()) return 0;
  return totals_[root];
}

const std::unordered_map<Fragment, long, FragmentHash>* FragmentTable::fragments_of(
    SymbolId root) const {
  auto it = by_root_.find(root);
  return it == by_root_.end() ? nullptr : &it->second;
}

bool FragmentTable::operator==(const FragmentTable& o) const {
  if (by_root_ != o.by_root_) return false;
  std::size_t n = std::max(totals_.size(), o.totals_.size());
  for (std::size_t i = 0; i < n; ++i) {
    long a = i < totals_.size() ? totals_[i] : 0;
    long b = i < o.totals_.size() ? o.totals_[i] : 0;
    if (a != b) return false;
  }
  return true;
}

std::size_t FragmentTable::distinct() const {
  std::size_t n = 0;
  for (const auto& [r, m] : by_root_) n += m.size();
  return n;
}

namespace {

bool site_eligible(const TreeNode& n, bool isRoot) {
  return !isRoot && !n.is_leaf() && !n.frozen;
}

void build_site_index(SamplerState& state) {
  auto& corpus = *state.corpus;
  state.index.clear();
  state.order.clear();
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    state.index.push_back(build_index(corpus[t].root));
    // Post-order positions, numbered to match build_index's preorder ids.
    int counter = 0;
    std::function<void(TreeNode&, bool)> rec = [&](TreeNode& n, bool isRoot) {
      int id = counter++;
      for (auto& c : n.children) rec(c, false);
      if (site_eligible(n, isRoot))
        state.order.push_back({static_cast<int>(t), id});
    };
    rec(corpus[t].root, true);
  }
}

double parse_bernoulli(const std::string& policy) {
  const std::string pre = "bernoulli(";
  if (policy.size() <= pre.size() + 1 || policy.compare(0, pre.size(), pre) != 0 ||
      policy.back() != ')')
    throw usage_error("unknown init policy '" + policy + "'");
  double q;
  try {
    q = std::stod(policy.substr(pre.size(), policy.size() - pre.size() - 1));
  } catch (const std::exception&) {
    throw usage_error("bad bernoulli parameter in '" + policy + "'");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw usage_error("bernoulli parameter must be in [0,1]");
  return q;
}

}  // namespace

FragmentTable recount(const std::vector<SourceTree>& corpus) {
  FragmentTable table;
  for (const auto& t : corpus) {
    for_each_node(t.root, [&](const TreeNode& n) {
      if (n.z) table.add(fragment_at(n));
    });
  }
  return table;
}

SamplerState init_state(std::vector<SourceTree>& corpus, const Pcfg& pcfg,
                        const PriorParams& params, std::uint64_t seed,
                        const std::string& initPolicy) {
  SamplerState state;
  state.corpus = &corpus;
  state.pcfg = &pcfg;
  state.params = params;
  state.seed = seed;
  state.rng = Rng(seed);

  for (auto& t : corpus) {
    for_each_node(t.root, [](TreeNode& n) { n.z = false; });
    t.root.z = true;
  }
  build_site_index(state);

  if (initPolicy == "all-boundaries") {
    for (const auto& s : state.order) state.index[s.tree].nodes[s.node]->z = true;
  } else {
    double q = parse_bernoulli(initPolicy);
    for (const auto& s : state.order)
      state.index[s.tree].nodes[s.node]->z = state.rng.bernoulli(q);
  }

  state.table = recount(corpus);
  return state;
}

namespace {

// Eq. 3 in log space, with optional shift for scoring the second fragment of a
// split as if the first had already been added.
double lpp_shifted(const SamplerState& state, const Fragment& f, long extraCount,
                   long extraTotal) {
  double alpha = state.params.alpha;
  long c = state.table.count(f) + extraCount;
  long tot = state.table.total(f.root()) + extraTotal;
  double lp0 = fragment_log_prior(f, *state.pcfg, state.params);
  double num = std::log(alpha) + lp0;
  if (c > 0) num = log_add(std::log(static_cast<double>(c)), num);
  return num - std::log(static_cast<double>(tot) + alpha);
}

struct Candidates {
  Fragment fj, fs, ft;  // joined; split parent; split child
  TreeNode* site;
  bool was_split;
};

Candidates make_candidates(SamplerState& state, int tree, int node) {
  auto& idx = state.index[tree];
  TreeNode* tn = idx.nodes[node];
  int ai = idx.parent[node];
  while (!idx.nodes[ai]->z) ai = idx.parent[ai];
  TreeNode* anode = idx.nodes[ai];

  Candidates c;
  c.site = tn;
  c.was_split = tn->z;
  tn->z = true;
  c.fs = fragment_at(*anode);
  c.ft = fragment_at(*tn);
  tn->z = false;
  c.fj = fragment_at(*anode);
  tn->z = c.was_split;
  return c;
}

// P(z=0) given a table with the affected fragments excluded. The second split
// factor sees the first split fragment already added (exact sequential
// predictive; the shift only matters when the two share a root symbol).
double merge_value(const SamplerState& state, const Candidates& c) {
  double w0 = lpp_shifted(state, c.fj, 0, 0);
  double w1 = lpp_shifted(state, c.fs, 0, 0) +
              lpp_shifted(state, c.ft, c.ft == c.fs ? 1 : 0,
                          c.ft.root() == c.fs.root() ? 1 : 0);
  return std::exp(w0 - log_add(w0, w1));
}

}  // namespace

double log_posterior_predictive(const SamplerState& state, const Fragment& f) {
  return lpp_shifted(state, f, 0, 0);
}

double merge_probability(SamplerState& state, int tree, int node) {
  Candidates c = make_candidates(state, tree, node);
  return merge_value(state, c);
}

void GibbsKernel::sweep(SamplerState& state) {
  const std::size_t n = state.order.size();
  std::vector<SamplerState::Site> shuffled;
  const std::vector<SamplerState::Site>* sites = &state.order;
  if (state.random_scan) {
    shuffled = state.order;
    for (std::size_t i = n; i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[state.rng.below(i)]);
    sites = &shuffled;
  }

  for (const auto& s : *sites) {
    Candidates c = make_candidates(state, s.tree, s.node);
    if (c.was_split) {
      state.table.add(c.fs, -1);
      state.table.add(c.ft, -1);
    } else {
      state.table.add(c.fj, -1);
    }
    double p0 = merge_value(state, c);
    bool merge = state.rng.uniform01() < p0;
    c.site->z = !merge;
    if (merge) {
      state.table.add(c.fj);
    } else {
      state.table.add(c.fs);
      state.table.add(c.ft);
    }
  }
}

PosteriorSample snapshot(const SamplerState& state) {
  PosteriorSample s;
  s.iteration = state.iteration;
  const auto& corpus = *state.corpus;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    for_each_node(corpus[t].root, [&](const TreeNode& n) {
      if (n.z) s.fragments.emplace_back(fragment_at(n), static_cast<int>(t));
    });
  }
  return s;
}

std::vector<PosteriorSample> continue_chain(SamplerState& state, int iterations, int burnIn,
                                            int sampleEvery, SamplerKernel* kernel) {
  if (burnIn >= iterations) throw usage_error("burn-in must be smaller than iterations");
  if (sampleEvery < 1) throw usage_error("sample stride must be >= 1");
  GibbsKernel gibbs;
  if (!kernel) kernel = &gibbs;

  std::vector<PosteriorSample> samples;
  while (state.iteration < iterations) {
    kernel->sweep(state);
    ++state.iteration;
    long it = state.iteration;
    if (it > burnIn && (it - burnIn - 1) % sampleEvery == 0) samples.push_back(snapshot(state));
  }
  return samples;
}

std::vector<PosteriorSample> run_chain(SamplerState& state, int iterations, int burnIn,
                                       int sampleEvery, SamplerKernel* kernel) {
  return continue_chain(state, iterations, burnIn, sampleEvery, kernel);
}

namespace {
using Json = nlohmann::ordered_json;
}

void save_checkpoint(const std::string& path, const SamplerState& state) {
  Json j = Json::object();
  j["version"] = 1;
  j["seed"] = state.seed;
  j["iteration"] = state.iteration;
  j["alpha"] = state.params.alpha;
  j["pstop"] = state.params.p_stop;
  j["randomScan"] = state.random_scan;
  j["rng"] = state.rng.save_state();
  Json trees = Json::array();
  for (std::size_t t = 0; t < state.corpus->size(); ++t) {
    const auto& tree = (*state.corpus)[t];
    Json e = Json::object();
    e["path"] = tree.path;
    Json z = Json::array();
    for_each_node(tree.root, [&](const TreeNode& n) { z.push_back(n.z ? 1 : 0); });
    e["z"] = std::move(z);
    trees.push_back(std::move(e));
  }
  j["trees"] = std::move(trees);
  write_file(path, j.dump() + "\n");
}

SamplerState load_checkpoint(const std::string& path, std::vector<SourceTree>& corpus,
                             const Pcfg& pcfg) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw schema_error(path + ": invalid checkpoint JSON");
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw schema_error(path + ": unsupported checkpoint version");

  SamplerState state;
  state.corpus = &corpus;
  state.pcfg = &pcfg;
  state.seed = j.at("seed").get<std::uint64_t>();
  state.iteration = j.at("iteration").get<long>();
  state.params.alpha = j.at("alpha").get<double>();
  state.params.p_stop = j.at("pstop").get<double>();
  state.random_scan = j.value("randomScan", false);
  state.rng.load_state(j.at("rng").get<std::string>());

  const Json& trees = j.at("trees");
  if (!trees.is_array() || trees.size() != corpus.size())
    throw schema_error(path + ": checkpoint has " + std::to_string(trees.size()) +
                       " trees, corpus has " + std::to_string(corpus.size()));
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    const Json& e = trees[t];
    if (e.at("path").get<std::string>() != corpus[t].path)
      throw schema_error(path + ": tree " + std::to_string(t) + " path mismatch");
    const Json& z = e.at("z");
    std::size_t i = 0;
    bool ok = true;
    for_each_node(corpus[t].root, [&](TreeNode& n) {
      if (i >= z.size()) {
        ok = false;
        return;
      }
      n.z = z[i++].get<int>() != 0;
    });
    if (!ok || i != z.size())
      throw schema_error(path + ": tree " + std::to_string(t) + " z-vector length mismatch");
    if (!corpus[t].root.z)
      throw schema_error(path + ": tree " + std::to_string(t) + " root z is not 1");
  }
  for (auto& tr : corpus) {
    bool ok = true;
    for_each_node(tr.root, [&](const TreeNode& n) {
      if (n.frozen && n.z) ok = false;
      if (n.is_leaf() && n.z) ok = false;
    });
    if (!ok) throw schema_error(path + ": checkpoint sets z on frozen or leaf nodes");
  }

  build_site_index(state);
  state.table = recount(corpus);
  return state;
}

}  // namespace haggis
