#include "haggis/config.hpp"

#include <json.hpp>

#include "haggis/util.hpp"

namespace haggis {

namespace {
using Json = nlohmann::ordered_json;
}

RunConfig parse_config_json(const std::string& content, const std::string& context) {
  Json j = Json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw schema_error(context + ": config must be a JSON object");

  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "pStop") cfg.pStop = value.get<double>();
      else if (key == "iterations") cfg.iterations = value.get<int>();
      else if (key == "burnIn") cfg.burnIn = value.get<int>();
      else if (key == "sampleEvery") cfg.sampleEvery = value.get<int>();
      else if (key == "cMin") cfg.cMin = value.get<long>();
      else if (key == "nMin") cfg.nMin = value.get<long>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "freezeCategories") cfg.freezeCategories = value.get<std::vector<std::string>>();
      else if (key == "initPolicy") cfg.initPolicy = value.get<std::string>();
      else if (key == "chains") cfg.chains = value.get<int>();
      else if (key == "maxDepth") cfg.maxDepth = value.get<int>();
      else if (key == "sTh") cfg.sTh = value.get<double>();
      else throw schema_error(context + ": unknown config key '" + key + "'");
    } catch (const Json::exception&) {
      throw schema_error(context + ": bad value for config key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return parse_config_json(read_file(path), path);
}

std::string config_to_json(const RunConfig& cfg) {
  Json j = Json::object();
  j["alpha"] = cfg.alpha;
  j["pStop"] = cfg.pStop;
  j["iterations"] = cfg.iterations;
  j["burnIn"] = cfg.burnIn;
  j["sampleEvery"] = cfg.sampleEvery;
  j["cMin"] = cfg.cMin;
  j["nMin"] = cfg.nMin;
  j["seed"] = cfg.seed;
  j["freezeCategories"] = cfg.freezeCategories;
  j["initPolicy"] = cfg.initPolicy;
  j["chains"] = cfg.chains;
  j["maxDepth"] = cfg.maxDepth;
  j["sTh"] = cfg.sTh;
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
  std::string canon = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw usage_error("alpha must be positive");
  if (!(cfg.pStop > 0.0 && cfg.pStop < 1.0)) throw usage_error("pStop must be in (0,1)");
  if (cfg.iterations < 1) throw usage_error("iterations must be >= 1");
  if (cfg.burnIn < 0 || cfg.burnIn >= cfg.iterations)
    throw usage_error("burnIn must be in [0, iterations)");
  if (cfg.sampleEvery < 1) throw usage_error("sampleEvery must be >= 1");
  if (cfg.cMin < 1) throw usage_error("cMin must be >= 1");
  if (cfg.nMin < 1) throw usage_error("nMin must be >= 1");
  if (cfg.chains < 1) throw usage_error("chains must be >= 1");
  if (cfg.maxDepth < 1) throw usage_error("maxDepth must be >= 1");
}

}  // namespace haggis
