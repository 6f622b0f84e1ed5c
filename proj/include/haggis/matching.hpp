#pragma once

#include <vector>

#include "haggis/fragment.hpp"
#include "haggis/tree.hpp"

namespace haggis {

// Match results for one file. Node ids are preorder indices into the file's
// tree. A match at node v embeds the idiom with internal nodes matching
// exactly (symbol and arity) and leaves matching any node with that symbol;
// covered nodes are the embedded ones, not subtrees below frontier leaves.
struct FileMatches {
  std::vector<std::vector<int>> roots;  // per idiom: match root node ids
  std::vector<char> covered;            // per node: 1 if inside any match
  long matched_nodes = 0;
  long total_nodes = 0;
};

struct MatchReport {
  std::vector<FileMatches> files;
  std::vector<long> match_counts;  // per idiom: total match instances
  std::vector<long> file_counts;   // per idiom: files with >= 1 match
};

// All match root ids of one idiom in one tree, via a per-symbol candidate
// index.
std::vector<int> match_fragment(const Fragment& idiom, const SourceTree& tree);

// Reference matcher: tries every node with a direct recursive comparison.
std::vector<int> match_fragment_naive(const Fragment& idiom, const SourceTree& tree);

// Matches every idiom against every file; parallel over files when asked.
MatchReport match_corpus(const std::vector<Fragment>& idioms,
                         const std::vector<SourceTree>& corpus, bool parallel = true);

}  // namespace haggis
