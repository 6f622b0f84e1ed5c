#pragma once

#include <string>
#include <vector>

#include "haggis/fragment.hpp"
#include "haggis/matching.hpp"
#include "haggis/symbols.hpp"
#include "haggis/tree.hpp"

namespace haggis {

struct EvalSummary {
  double coverage = 0.0;       // covered nodes / total nodes
  double precision = 0.0;      // idioms with >= 1 match / idioms
  double avg_size = 0.0;       // mean content size over match instances
  bool avg_size_defined = false;
  long total_matches = 0;
  long covered_nodes = 0;
  long total_nodes = 0;
};

// Content sizes exclude child-group heads and binarization dummies.
EvalSummary summarize(const MatchReport& report, const std::vector<Fragment>& idioms,
                      const SymbolTable& table);

// Lift between package imports and idioms, over file-level frequencies:
// lift(t,p) = P(p,t) / (P(p) P(t)). Cells where either marginal is zero are
// undefined and stored as 0 with defined=0. Row-major idioms x packages.
struct LiftMatrix {
  std::vector<std::string> packages;
  int idiom_count = 0;
  int file_count = 0;
  std::vector<double> lift;
  std::vector<char> defined;
  std::vector<double> p_package;  // per package
  std::vector<double> p_idiom;    // per idiom
  std::vector<double> p_joint;    // row-major idioms x packages

  double at(int idiom, int pkg) const { return lift[idiom * packages.size() + pkg]; }
  bool is_defined(int idiom, int pkg) const { return defined[idiom * packages.size() + pkg]; }
};

LiftMatrix lift_matrix(const MatchReport& report, const std::vector<SourceTree>& corpus);

struct Suggestion {
  int idiom = -1;
  double score = 0.0;
};

// Idioms with max-lift over the imports above the threshold, ranked by score,
// ties by fileCount then idiom id.
std::vector<Suggestion> suggest(const std::vector<std::string>& imports, const LiftMatrix& m,
                                const std::vector<long>& idiom_file_counts, double sTh);

// Fraction of files whose top-k suggested idioms include at least one
// relevant idiom.
double recall_at_rank_k(const std::vector<std::vector<int>>& suggested_per_file,
                        const std::vector<std::vector<int>>& relevant_per_file, int k);

void write_lift_csv(const std::string& path, const LiftMatrix& m);

// Reads back what write_lift_csv wrote (values only: packages, lift cells and
// the defined mask).
LiftMatrix read_lift_csv(const std::string& path);

}  // namespace haggis
