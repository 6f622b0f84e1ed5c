#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "haggis/fragment.hpp"
#include "haggis/sampler.hpp"
#include "haggis/symbols.hpp"

namespace haggis {

struct Idiom {
  Fragment fragment;
  long sample_count = 0;  // occurrences across all samples (multiset)
  long file_count = 0;    // distinct corpus files it was cut from
};

struct IdiomSet {
  std::vector<Idiom> idioms;
  double alpha = 1.0;
  double pstop = 0.7;
  long cmin = 2;
  long nmin = 5;
  std::uint64_t seed = 1;
  std::string provenance;  // run config hash
};

// Multiset union of fragments across samples, pruned to sample_count >= cMin
// and content node count >= nMin, ranked by (file_count, sample_count,
// content size) descending with the code vector as the final tiebreak.
IdiomSet extract_idioms(const std::vector<PosteriorSample>& samples, long cMin, long nMin,
                        const SymbolTable& table);

// Demo-language surface syntax with $-slots for nonterminal leaves.
std::string render_template(const Fragment& idiom, const SymbolTable& table);

void save_idiom_set(const std::string& path, const IdiomSet& set, const SymbolTable& table);
IdiomSet load_idiom_set(const std::string& path, SymbolTable& table);

// Re-interns a canonically printed symbol (node_text / group / dummy /
// metavariable forms) into the table.
SymbolId parse_symbol_text(SymbolTable& table, const std::string& text);

// Raw aggregated samples: mine writes them, extract reads them back.
void save_samples(const std::string& path, const std::vector<PosteriorSample>& samples,
                  const SymbolTable& table);
std::vector<PosteriorSample> load_samples(const std::string& path, SymbolTable& table);

}  // namespace haggis
