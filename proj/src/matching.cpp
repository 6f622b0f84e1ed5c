#include "haggis/matching.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace haggis {

namespace {

bool match_at(const TreeNode& frag, const TreeNode& node) {
  if (frag.symbol != node.symbol) return false;
  if (frag.is_leaf()) return true;
  if (frag.children.size() != node.children.size()) return false;
  for (std::size_t i = 0; i < frag.children.size(); ++i)
    if (!match_at(frag.children[i], node.children[i])) return false;
  return true;
}

struct FileIndex {
  TreeIndex idx;
  std::unordered_map<SymbolId, std::vector<int>> by_symbol;
  std::unordered_map<const TreeNode*, int> id_of;

  explicit FileIndex(const SourceTree& t) : idx(build_index(const_cast<TreeNode&>(t.root))) {
    for (std::size_t i = 0; i < idx.nodes.size(); ++i) {
      by_symbol[idx.nodes[i]->symbol].push_back(static_cast<int>(i));
      id_of[idx.nodes[i]] = static_cast<int>(i);
    }
  }
};

void mark_covered(const TreeNode& frag, const TreeNode& node, const FileIndex& fi,
                  std::vector<char>& covered) {
  covered[fi.id_of.at(&node)] = 1;
  if (frag.is_leaf()) return;
  for (std::size_t i = 0; i < frag.children.size(); ++i)
    mark_covered(frag.children[i], node.children[i], fi, covered);
}

FileMatches match_file(const std::vector<TreeNode>& decoded, const SourceTree& tree) {
  FileIndex fi(tree);
  FileMatches fm;
  fm.total_nodes = static_cast<long>(fi.idx.nodes.size());
  fm.covered.assign(fi.idx.nodes.size(), 0);
  fm.roots.resize(decoded.size());
  for (std::size_t k = 0; k < decoded.size(); ++k) {
    auto it = fi.by_symbol.find(decoded[k].symbol);
    if (it == fi.by_symbol.end()) continue;
    for (int id : it->second) {
      if (match_at(decoded[k], *fi.idx.nodes[id])) {
        fm.roots[k].push_back(id);
        mark_covered(decoded[k], *fi.idx.nodes[id], fi, fm.covered);
      }
    }
  }
  fm.matched_nodes = std::count(fm.covered.begin(), fm.covered.end(), char(1));
  return fm;
}

}  // namespace

std::vector<int> match_fragment(const Fragment& idiom, const SourceTree& tree) {
  TreeNode decoded = fragment_to_tree(idiom);
  FileIndex fi(tree);
  std::vector<int> out;
  auto it = fi.by_symbol.find(decoded.symbol);
  if (it == fi.by_symbol.end()) return out;
  for (int id : it->second)
    if (match_at(decoded, *fi.idx.nodes[id])) out.push_back(id);
  return out;
}

std::vector<int> match_fragment_naive(const Fragment& idiom, const SourceTree& tree) {
  TreeNode decoded = fragment_to_tree(idiom);
  std::vector<int> out;
  int counter = 0;
  for_each_node(tree.root, [&](const TreeNode& n) {
    int id = counter++;
    if (match_at(decoded, n)) out.push_back(id);
  });
  return out;
}

MatchReport match_corpus(const std::vector<Fragment>& idioms,
                         const std::vector<SourceTree>& corpus, bool parallel) {
  std::vector<TreeNode> decoded;
  decoded.reserve(idioms.size());
  for (const auto& f : idioms) decoded.push_back(fragment_to_tree(f));

  MatchReport report;
  report.files.resize(corpus.size());
  std::exception_ptr err;
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      try {
        report.files[i] = match_file(decoded, corpus[i]);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
  } else {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      report.files[i] = match_file(decoded, corpus[i]);
  }
  if (err) std::rethrow_exception(err);

  report.match_counts.assign(idioms.size(), 0);
  report.file_counts.assign(idioms.size(), 0);
  for (const auto& fm : report.files) {
    for (std::size_t k = 0; k < idioms.size(); ++k) {
      report.match_counts[k] += static_cast<long>(fm.roots[k].size());
      if (!fm.roots[k].empty()) ++report.file_counts[k];
    }
  }
  return report;
}

}  // namespace haggis
