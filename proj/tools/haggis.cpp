#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "haggis/config.hpp"
#include "haggis/demo_lang.hpp"
#include "haggis/generate.hpp"
#include "haggis/grammar.hpp"
#include "haggis/idioms.hpp"
#include "haggis/matching.hpp"
#include "haggis/metrics.hpp"
#include "haggis/parallel.hpp"
#include "haggis/sampler.hpp"
#include "haggis/transform.hpp"
#include "haggis/tree_io.hpp"
#include "haggis/util.hpp"

namespace {

using haggis::RunConfig;
using Json = nlohmann::ordered_json;

// Flags override the config file; only flags the user actually passed count.
struct ConfigFlags {
  CLI::Option* alpha = nullptr;
  CLI::Option* pstop = nullptr;
  CLI::Option* iters = nullptr;
  CLI::Option* burnIn = nullptr;
  CLI::Option* sampleEvery = nullptr;
  CLI::Option* cmin = nullptr;
  CLI::Option* nmin = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* freeze = nullptr;
  CLI::Option* init = nullptr;
  CLI::Option* chains = nullptr;
  CLI::Option* maxDepth = nullptr;
  CLI::Option* sth = nullptr;

  RunConfig staging;
  std::string configPath;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", configPath, "JSON config file (flags override it)");
    alpha = cmd->add_option("--alpha", staging.alpha, "DP concentration");
    pstop = cmd->add_option("--pstop", staging.pStop, "geometric stop probability of the prior");
    iters = cmd->add_option("--iters", staging.iterations, "Gibbs sweeps");
    burnIn = cmd->add_option("--burn-in", staging.burnIn, "sweeps discarded before sampling");
    sampleEvery = cmd->add_option("--sample-every", staging.sampleEvery, "sampling stride");
    cmin = cmd->add_option("--cmin", staging.cMin, "minimum sample count per idiom");
    nmin = cmd->add_option("--nmin", staging.nMin, "minimum content nodes per idiom");
    seed = cmd->add_option("--seed", staging.seed, "rng seed");
    freeze = cmd->add_option("--freeze", staging.freezeCategories,
                             "frozen node category (repeatable; overrides defaults)");
    init = cmd->add_option("--init", staging.initPolicy,
                           "boundary init: all-boundaries or bernoulli(q)");
    chains = cmd->add_option("--chains", staging.chains, "independent seeded chains to merge");
    maxDepth = cmd->add_option("--max-depth", staging.maxDepth, "generation depth cap");
    sth = cmd->add_option("--sth", staging.sTh, "suggestion lift threshold");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!configPath.empty()) cfg = haggis::load_config(configPath);
    if (alpha->count()) cfg.alpha = staging.alpha;
    if (pstop->count()) cfg.pStop = staging.pStop;
    if (iters->count()) cfg.iterations = staging.iterations;
    if (burnIn->count()) cfg.burnIn = staging.burnIn;
    if (sampleEvery->count()) cfg.sampleEvery = staging.sampleEvery;
    if (cmin->count()) cfg.cMin = staging.cMin;
    if (nmin->count()) cfg.nMin = staging.nMin;
    if (seed->count()) cfg.seed = staging.seed;
    if (freeze->count()) cfg.freezeCategories = staging.freezeCategories;
    if (init->count()) cfg.initPolicy = staging.initPolicy;
    if (chains->count()) cfg.chains = staging.chains;
    if (maxDepth->count()) cfg.maxDepth = staging.maxDepth;
    if (sth->count()) cfg.sTh = staging.sTh;
    haggis::validate_config(cfg);
    return cfg;
  }
};

haggis::TransformOptions transform_options(const RunConfig& cfg) {
  haggis::TransformOptions opt = haggis::default_demo_options();
  if (!cfg.freezeCategories.empty()) opt.freeze_categories = cfg.freezeCategories;
  return opt;
}

std::vector<haggis::SourceTree> load_transformed(const std::string& corpusPath,
                                                 const RunConfig& cfg,
                                                 haggis::SymbolTable& table, bool parallel) {
  auto raw = haggis::ingest_corpus(corpusPath);
  return haggis::transform_corpus(raw, transform_options(cfg), table, parallel);
}

void write_or_print(const std::string& outPath, const std::string& content) {
  if (outPath.empty())
    std::cout << content;
  else
    haggis::write_file(outPath, content);
}

int cmd_parse(const std::string& srcDir, const std::string& outPath) {
  auto trees = haggis::demo::parse_directory(srcDir);
  if (trees.empty()) throw haggis::io_error("no .dl files under " + srcDir);
  haggis::write_corpus_jsonl(outPath, trees);
  std::cerr << "parsed " << trees.size() << " files\n";
  return 0;
}

int cmd_split(const std::string& corpusPath, double ratio, std::uint64_t seed,
              const std::string& trainPath, const std::string& testPath) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw haggis::usage_error("ratio must be in (0,1)");
  auto trees = haggis::ingest_corpus(corpusPath);
  std::vector<std::size_t> idx(trees.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  haggis::Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  std::size_t nTrain = static_cast<std::size_t>(std::llround(ratio * trees.size()));
  std::vector<char> inTrain(trees.size(), 0);
  for (std::size_t i = 0; i < nTrain && i < idx.size(); ++i) inTrain[idx[i]] = 1;

  std::vector<haggis::RawTree> train, test;
  for (std::size_t i = 0; i < trees.size(); ++i)
    (inTrain[i] ? train : test).push_back(std::move(trees[i]));
  haggis::write_corpus_jsonl(trainPath, train);
  haggis::write_corpus_jsonl(testPath, test);
  std::cerr << "split " << train.size() << " train / " << test.size() << " test\n";
  return 0;
}

struct MineOutputs {
  std::string idioms;
  std::string grammar;
  std::string samples;
  std::string checkpoint;
  std::string resume;
  bool serial = false;
};

int cmd_mine(const std::string& corpusPath, const RunConfig& cfg, const MineOutputs& out) {
  haggis::SymbolTable table;
  auto corpus = load_transformed(corpusPath, cfg, table, !out.serial);
  haggis::Pcfg pcfg = haggis::estimate_pcfg(corpus);
  haggis::PriorParams params{cfg.pStop, cfg.alpha};

  if (!out.checkpoint.empty() && cfg.chains != 1)
    throw haggis::usage_error("--checkpoint requires --chains 1");
  if (!out.resume.empty() && cfg.chains != 1)
    throw haggis::usage_error("--resume requires --chains 1");

  std::vector<std::vector<haggis::PosteriorSample>> perChain(cfg.chains);
  if (!out.resume.empty()) {
    auto state = haggis::load_checkpoint(out.resume, corpus, pcfg);
    perChain[0] = haggis::continue_chain(state, cfg.iterations, cfg.burnIn, cfg.sampleEvery);
    if (!out.checkpoint.empty()) haggis::save_checkpoint(out.checkpoint, state);
  } else if (cfg.chains == 1) {
    auto state = haggis::init_state(corpus, pcfg, params, cfg.seed, cfg.initPolicy);
    perChain[0] = haggis::run_chain(state, cfg.iterations, cfg.burnIn, cfg.sampleEvery);
    if (!out.checkpoint.empty()) haggis::save_checkpoint(out.checkpoint, state);
  } else {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < cfg.chains; ++c) {
      try {
        auto chainCorpus = corpus;  // each chain owns its z flags
        auto state =
            haggis::init_state(chainCorpus, pcfg, params, cfg.seed + c, cfg.initPolicy);
        perChain[c] = haggis::run_chain(state, cfg.iterations, cfg.burnIn, cfg.sampleEvery);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  }

  std::vector<haggis::PosteriorSample> samples;
  for (auto& chain : perChain)
    for (auto& s : chain) samples.push_back(std::move(s));

  haggis::IdiomSet set = haggis::extract_idioms(samples, cfg.cMin, cfg.nMin, table);
  set.alpha = cfg.alpha;
  set.pstop = cfg.pStop;
  set.seed = cfg.seed;
  set.provenance = haggis::config_hash(cfg);
  haggis::save_idiom_set(out.idioms, set, table);
  if (!out.grammar.empty()) haggis::save_grammar(out.grammar, pcfg, table);
  if (!out.samples.empty()) haggis::save_samples(out.samples, samples, table);
  std::cerr << "mined " << set.idioms.size() << " idioms from " << samples.size()
            << " samples\n";
  return 0;
}

int cmd_extract(const std::string& samplesPath, const RunConfig& cfg,
                const std::string& outPath) {
  haggis::SymbolTable table;
  auto samples = haggis::load_samples(samplesPath, table);
  haggis::IdiomSet set = haggis::extract_idioms(samples, cfg.cMin, cfg.nMin, table);
  set.alpha = cfg.alpha;
  set.pstop = cfg.pStop;
  set.seed = cfg.seed;
  set.provenance = haggis::config_hash(cfg);
  haggis::save_idiom_set(outPath, set, table);
  std::cerr << "extracted " << set.idioms.size() << " idioms\n";
  return 0;
}

std::vector<haggis::Fragment> idiom_fragments(const haggis::IdiomSet& set) {
  std::vector<haggis::Fragment> out;
  out.reserve(set.idioms.size());
  for (const auto& idiom : set.idioms) out.push_back(idiom.fragment);
  return out;
}

int cmd_evaluate(const std::string& idiomPath, const std::string& corpusPath,
                 const RunConfig& cfg, const std::string& outPath, bool serial) {
  haggis::SymbolTable table;
  auto corpus = load_transformed(corpusPath, cfg, table, !serial);
  haggis::IdiomSet set = haggis::load_idiom_set(idiomPath, table);
  auto fragments = idiom_fragments(set);
  auto report = haggis::match_corpus(fragments, corpus, !serial);
  auto summary = haggis::summarize(report, fragments, table);

  Json j = Json::object();
  j["coverage"] = summary.coverage;
  j["precision"] = summary.precision;
  j["avgSize"] = summary.avg_size;
  j["avgSizeDefined"] = summary.avg_size_defined;
  j["coveredNodes"] = summary.covered_nodes;
  j["totalNodes"] = summary.total_nodes;
  j["totalMatches"] = summary.total_matches;
  j["files"] = corpus.size();
  Json per = Json::array();
  for (std::size_t k = 0; k < set.idioms.size(); ++k) {
    Json e = Json::object();
    e["id"] = k;
    e["template"] = haggis::render_template(set.idioms[k].fragment, table);
    e["matches"] = report.match_counts[k];
    e["files"] = report.file_counts[k];
    per.push_back(std::move(e));
  }
  j["perIdiom"] = std::move(per);
  write_or_print(outPath, j.dump(2) + "\n");
  return 0;
}

int cmd_lift(const std::string& idiomPath, const std::string& corpusPath, const RunConfig& cfg,
             const std::string& outPath, bool serial) {
  haggis::SymbolTable table;
  auto corpus = load_transformed(corpusPath, cfg, table, !serial);
  haggis::IdiomSet set = haggis::load_idiom_set(idiomPath, table);
  auto report = haggis::match_corpus(idiom_fragments(set), corpus, !serial);
  auto matrix = haggis::lift_matrix(report, corpus);
  haggis::write_lift_csv(outPath, matrix);
  std::cerr << "lift matrix: " << matrix.idiom_count << " idioms x " << matrix.packages.size()
            << " packages\n";
  return 0;
}

int cmd_suggest(const std::string& idiomPath, const std::string& liftPath,
                const std::vector<std::string>& imports, double sTh,
                const std::string& outPath) {
  haggis::SymbolTable table;
  haggis::IdiomSet set = haggis::load_idiom_set(idiomPath, table);
  haggis::LiftMatrix matrix = haggis::read_lift_csv(liftPath);
  if (matrix.idiom_count != static_cast<int>(set.idioms.size()))
    throw haggis::schema_error("lift matrix rows do not match the idiom file");
  std::vector<long> fileCounts;
  for (const auto& idiom : set.idioms) fileCounts.push_back(idiom.file_count);
  auto ranked = haggis::suggest(imports, matrix, fileCounts, sTh);

  Json arr = Json::array();
  for (const auto& s : ranked) {
    Json e = Json::object();
    e["idiom"] = s.idiom;
    e["score"] = s.score;
    e["template"] = haggis::render_template(set.idioms[s.idiom].fragment, table);
    arr.push_back(std::move(e));
  }
  write_or_print(outPath, arr.dump(2) + "\n");
  return 0;
}

struct SampleInputs {
  std::string checkpoint;
  std::string trees;
  std::string idioms;
  std::string grammar;
  int n = 1;
  std::uint64_t seed = 1;
  int maxDepth = 40;
  std::string out;
};

int cmd_sample(const SampleInputs& in, const RunConfig& cfg) {
  bool fromCheckpoint = !in.checkpoint.empty();
  bool fromIdioms = !in.idioms.empty();
  if (fromCheckpoint == fromIdioms)
    throw haggis::usage_error("pass exactly one of --checkpoint or --idioms");
  if (in.grammar.empty()) throw haggis::usage_error("--grammar is required");
  if (in.n < 0) throw haggis::usage_error("-n must be >= 0");

  haggis::LoadedGrammar g = haggis::load_grammar(in.grammar);
  haggis::FragmentTable fragTable;
  haggis::PriorParams params{cfg.pStop, cfg.alpha};

  std::vector<haggis::SourceTree> corpus;
  if (fromCheckpoint) {
    if (in.trees.empty())
      throw haggis::usage_error("--checkpoint needs --trees (the mined corpus)");
    auto raw = haggis::ingest_corpus(in.trees);
    corpus = haggis::transform_corpus(raw, transform_options(cfg), g.table, true);
    auto state = haggis::load_checkpoint(in.checkpoint, corpus, g.pcfg);
    fragTable = std::move(state.table);
    params = state.params;
  } else {
    haggis::IdiomSet set = haggis::load_idiom_set(in.idioms, g.table);
    params = haggis::PriorParams{set.pstop, set.alpha};
    for (const auto& idiom : set.idioms)
      fragTable.add(idiom.fragment, std::max(idiom.sample_count, 1L));
  }

  haggis::GenerationModel model(g.pcfg, fragTable, params);
  haggis::Rng rng(in.seed);
  std::string rendered;
  for (int i = 0; i < in.n; ++i) {
    haggis::TreeNode tree = model.sample_tree(rng, in.maxDepth);
    rendered += haggis::demo::render_node(tree, g.table);
    rendered += '\n';
  }
  write_or_print(in.out, rendered);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DP-pTSG idiom miner over demo-language corpora"};
  app.require_subcommand(1);

  // parse
  auto* parse = app.add_subcommand("parse", "parse .dl sources into a corpus JSONL");
  std::string parseSrc, parseOut;
  parse->add_option("--src", parseSrc, "source directory")->required();
  parse->add_option("--out", parseOut, "corpus JSONL path")->required();

  // split
  auto* split = app.add_subcommand("split", "split a corpus into train/test");
  std::string splitCorpus, splitTrain, splitTest;
  double splitRatio = 0.7;
  std::uint64_t splitSeed = 1;
  split->add_option("--corpus", splitCorpus, "corpus JSONL")->required();
  split->add_option("--ratio", splitRatio, "train fraction");
  split->add_option("--seed", splitSeed, "shuffle seed");
  split->add_option("--train", splitTrain, "train output")->required();
  split->add_option("--test", splitTest, "test output")->required();

  // mine
  auto* mine = app.add_subcommand("mine", "run the sampler and extract idioms");
  std::string mineCorpus;
  MineOutputs mineOut;
  ConfigFlags mineCfg;
  mine->add_option("--corpus", mineCorpus, "corpus JSONL")->required();
  mine->add_option("--out", mineOut.idioms, "idiom set output")->required();
  mine->add_option("--grammar", mineOut.grammar, "write the estimated grammar");
  mine->add_option("--samples", mineOut.samples, "write raw posterior samples");
  mine->add_option("--checkpoint", mineOut.checkpoint, "write the final chain state");
  mine->add_option("--resume", mineOut.resume, "resume from a checkpoint");
  mine->add_flag("--serial", mineOut.serial, "disable parallel transform");
  mineCfg.attach(mine);

  // extract
  auto* extract = app.add_subcommand("extract", "extract idioms from saved samples");
  std::string extractSamples, extractOut;
  ConfigFlags extractCfg;
  extract->add_option("--samples", extractSamples, "samples file from mine")->required();
  extract->add_option("--out", extractOut, "idiom set output")->required();
  extractCfg.attach(extract);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "match idioms against a corpus");
  std::string evalIdioms, evalCorpus, evalOut;
  bool evalSerial = false;
  ConfigFlags evalCfg;
  evaluate->add_option("--idioms", evalIdioms, "idiom set file")->required();
  evaluate->add_option("--corpus", evalCorpus, "corpus JSONL")->required();
  evaluate->add_option("--out", evalOut, "report path (default stdout)");
  evaluate->add_flag("--serial", evalSerial, "disable parallel matching");
  evalCfg.attach(evaluate);

  // lift
  auto* lift = app.add_subcommand("lift", "lift matrix between imports and idioms");
  std::string liftIdioms, liftCorpus, liftOut;
  bool liftSerial = false;
  ConfigFlags liftCfg;
  lift->add_option("--idioms", liftIdioms, "idiom set file")->required();
  lift->add_option("--corpus", liftCorpus, "corpus JSONL")->required();
  lift->add_option("--out", liftOut, "CSV output path")->required();
  lift->add_flag("--serial", liftSerial, "disable parallel matching");
  liftCfg.attach(lift);

  // suggest
  auto* suggest = app.add_subcommand("suggest", "rank idioms for an import set");
  std::string suggestIdioms, suggestLift, suggestOut;
  std::vector<std::string> suggestImports;
  ConfigFlags suggestCfg;
  suggest->add_option("--idioms", suggestIdioms, "idiom set file")->required();
  suggest->add_option("--lift", suggestLift, "lift CSV from the lift command")->required();
  suggest->add_option("--import", suggestImports, "query import (repeatable)");
  suggest->add_option("--out", suggestOut, "output path (default stdout)");
  suggestCfg.attach(suggest);

  // sample
  auto* sample = app.add_subcommand("sample", "generate synthetic code from a posterior");
  SampleInputs sampleIn;
  ConfigFlags sampleCfg;
  sample->add_option("--checkpoint", sampleIn.checkpoint, "chain checkpoint");
  sample->add_option("--trees", sampleIn.trees, "corpus the checkpoint was mined from");
  sample->add_option("--idioms", sampleIn.idioms, "idiom set file (alternative source)");
  sample->add_option("--grammar", sampleIn.grammar, "grammar file from mine");
  sample->add_option("-n", sampleIn.n, "number of trees");
  sample->add_option("--out", sampleIn.out, "output path (default stdout)");
  sampleCfg.attach(sample);  // --seed and --max-depth come from here

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    haggis::apply_thread_cap();
    if (parse->parsed()) return cmd_parse(parseSrc, parseOut);
    if (split->parsed()) return cmd_split(splitCorpus, splitRatio, splitSeed, splitTrain, splitTest);
    if (mine->parsed()) return cmd_mine(mineCorpus, mineCfg.resolve(), mineOut);
    if (extract->parsed()) return cmd_extract(extractSamples, extractCfg.resolve(), extractOut);
    if (evaluate->parsed())
      return cmd_evaluate(evalIdioms, evalCorpus, evalCfg.resolve(), evalOut, evalSerial);
    if (lift->parsed())
      return cmd_lift(liftIdioms, liftCorpus, liftCfg.resolve(), liftOut, liftSerial);
    if (suggest->parsed()) {
      RunConfig cfg = suggestCfg.resolve();
      return cmd_suggest(suggestIdioms, suggestLift, suggestImports, cfg.sTh, suggestOut);
    }
    if (sample->parsed()) {
      RunConfig cfg = sampleCfg.resolve();
      sampleIn.seed = cfg.seed;
      sampleIn.maxDepth = cfg.maxDepth;
      return cmd_sample(sampleIn, cfg);
    }
  } catch (const haggis::Error& e) {
    std::cerr << "haggis: " << e.what() << "\n";
    switch (e.kind()) {
      case haggis::Error::Kind::Usage:
      case haggis::Error::Kind::Io:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "haggis: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
