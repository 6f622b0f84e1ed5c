#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace haggis {

// One experiment manifest: a single JSON document with these fields in
// camelCase; flags override file values. Unknown keys are rejected.
struct RunConfig {
  double alpha = 1.0;
  double pStop = 0.7;
  int iterations = 100;
  int burnIn = 75;
  int sampleEvery = 1;
  long cMin = 2;
  long nMin = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> freezeCategories;  // empty: demo-language defaults
  std::string initPolicy = "bernoulli(0)";
  int chains = 1;
  int maxDepth = 40;
  double sTh = 1.0;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& content, const std::string& context);
std::string config_to_json(const RunConfig& cfg);

// FNV-1a over the canonical JSON; recorded as idiom-set provenance.
std::string config_hash(const RunConfig& cfg);

void validate_config(const RunConfig& cfg);

}  // namespace haggis
