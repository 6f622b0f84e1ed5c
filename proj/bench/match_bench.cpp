// Serial vs OpenMP-parallel comparison for the two corpus-wide kernels:
// idiom matching and the raw-tree transform pipeline.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "haggis/demo_lang.hpp"
#include "haggis/fragment.hpp"
#include "haggis/grammar.hpp"
#include "haggis/matching.hpp"
#include "haggis/rng.hpp"
#include "haggis/transform.hpp"
#include "haggis/tree.hpp"

namespace {

using namespace haggis;

struct MatchWorkload {
  SymbolTable table;
  Pcfg pcfg;
  std::vector<SourceTree> corpus;
  std::vector<Fragment> idioms;

  MatchWorkload() {
    SymbolId E = table.intern_node("E", {});
    SymbolId T = table.intern_node("T", {});
    SymbolId F = table.intern_node("F", {});
    SymbolId plus = table.intern_node("+", {});
    SymbolId star = table.intern_node("*", {});
    SymbolId lparen = table.intern_node("(", {});
    SymbolId rparen = table.intern_node(")", {});
    SymbolId id = table.intern_node("id", {});
    for (SymbolId s : {E, T, F}) table.note_internal(s);
    pcfg.start = E;
    pcfg.add_rule({E, {T, plus, T}}, 7);
    pcfg.add_rule({E, {T}}, 3);
    pcfg.add_rule({T, {F, star, F}}, 6);
    pcfg.add_rule({T, {F}}, 4);
    pcfg.add_rule({F, {lparen, E, rparen}}, 1);
    pcfg.add_rule({F, {id}}, 9);
    pcfg.finalize();

    Rng rng(1);
    for (int i = 0; i < 600; ++i) {
      SourceTree st;
      st.path = "f" + std::to_string(i) + ".dl";
      st.root = derive(E, rng, 0);
      st.root.z = true;
      corpus.push_back(std::move(st));
    }
    PriorParams params{0.5, 1.0};
    SymbolId roots[3] = {E, T, F};
    for (int i = 0; i < 32; ++i)
      idioms.push_back(sample_fragment_from_prior(roots[i % 3], pcfg, params, rng));
  }

  TreeNode derive(SymbolId sym, Rng& rng, int depth) {
    auto [b, e] = pcfg.rules_for(sym);
    if (b == e) {
      TreeNode leaf;
      leaf.symbol = sym;
      return leaf;
    }
    int rule = depth >= 10 ? pick_shortest(b, e) : pcfg.sample_rule(sym, rng);
    TreeNode n;
    n.symbol = sym;
    for (SymbolId s : pcfg.production(rule).rhs) n.children.push_back(derive(s, rng, depth + 1));
    return n;
  }

  int pick_shortest(int b, int e) const {
    int best = b;
    for (int r = b; r < e; ++r)
      if (pcfg.production(r).rhs.size() < pcfg.production(best).rhs.size()) best = r;
    return best;
  }
};

const MatchWorkload& match_workload() {
  static MatchWorkload w;
  return w;
}

std::vector<RawTree> demo_corpus() {
  std::string body;
  for (int i = 0; i < 40; ++i) {
    body += "Cursor c" + std::to_string(i) + " = db.query(\"t" + std::to_string(i) + "\", " +
            std::to_string(i) + ");\n";
    body += "while (c" + std::to_string(i) + ".moveToNext()) { log.d(\"r\", c" +
            std::to_string(i) + ".getString(0)); }\n";
    body += "c" + std::to_string(i) + ".close();\n";
  }
  std::string source = "import android.db;\nimport util.log;\n" + body;
  std::vector<RawTree> corpus;
  for (int i = 0; i < 200; ++i)
    corpus.push_back(demo::parse_source(source, "f" + std::to_string(i) + ".dl"));
  return corpus;
}

void BM_MatchCorpus(benchmark::State& state) {
  const MatchWorkload& w = match_workload();
  bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    MatchReport r = match_corpus(w.idioms, w.corpus, parallel);
    benchmark::DoNotOptimize(r.match_counts.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(w.corpus.size() * w.idioms.size()));
  state.SetLabel(parallel ? "parallel" : "serial");
}
BENCHMARK(BM_MatchCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TransformCorpus(benchmark::State& state) {
  static const std::vector<RawTree> corpus = demo_corpus();
  const TransformOptions opt = default_demo_options();
  bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    SymbolTable table;
    std::vector<SourceTree> out = transform_corpus(corpus, opt, table, parallel);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
  state.SetLabel(parallel ? "parallel" : "serial");
}
BENCHMARK(BM_TransformCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
