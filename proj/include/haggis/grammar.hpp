#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "haggis/rng.hpp"
#include "haggis/symbols.hpp"
#include "haggis/tree.hpp"

namespace haggis {

struct Production {
  SymbolId lhs = -1;
  std::vector<SymbolId> rhs;

  bool operator==(const Production&) const = default;
  bool operator<(const Production& o) const {
    return lhs != o.lhs ? lhs < o.lhs : rhs < o.rhs;
  }
};

struct ProductionHash {
  std::size_t operator()(const Production& p) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::uint32_t>(p.lhs));
    for (SymbolId s : p.rhs) mix(static_cast<std::uint32_t>(s));
    return static_cast<std::size_t>(h);
  }
};

struct PriorParams {
  double p_stop = 0.7;
  double alpha = 1.0;
};

// Maximum-likelihood PCFG over the transformed corpus. Counts are the source
// of truth; probabilities are count/total(lhs), recomputed on load.
class Pcfg {
 public:
  SymbolId start = -1;

  void add_rule(Production p, long count);
  void finalize();  // sorts rules, computes spans and probabilities

  int find(const Production& p) const;
  int find(SymbolId lhs, const std::vector<SymbolId>& rhs) const;
  bool is_nonterminal(SymbolId s) const;
  long lhs_total(SymbolId s) const;

  std::size_t rule_count() const { return prods_.size(); }
  const Production& production(int i) const { return prods_[i]; }
  long count(int i) const { return counts_[i]; }
  double prob(int i) const { return probs_[i]; }
  double log_prob(int i) const { return log_probs_[i]; }

  // [begin, end) range of rule indices for a nonterminal.
  std::pair<int, int> rules_for(SymbolId lhs) const;

  // Rule index drawn proportional to P_ML(.|lhs).
  int sample_rule(SymbolId lhs, Rng& rng) const;

 private:
  std::vector<Production> prods_;
  std::vector<long> counts_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
  std::vector<std::pair<int, int>> spans_;  // by lhs symbol id
  std::vector<long> totals_;                // by lhs symbol id
  std::unordered_map<Production, int, ProductionHash> index_;
};

// Counts every internal node of every tree; start = first root symbol.
Pcfg estimate_pcfg(const std::vector<SourceTree>& corpus);

void save_grammar(const std::string& path, const Pcfg& pcfg, const SymbolTable& table);

struct LoadedGrammar {
  Pcfg pcfg;
  SymbolTable table;
};
LoadedGrammar load_grammar(const std::string& path);

}  // namespace haggis
