#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "haggis/symbols.hpp"

namespace haggis {

// Parse-tree node as ingested: kind, simple string properties and structural
// children grouped by property, both in declaration order.
struct RawNode {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> props;
  std::vector<std::pair<std::string, std::vector<RawNode>>> children;
  std::string text;
  bool has_text = false;

  bool operator==(const RawNode&) const = default;
};

struct RawTree {
  std::string path;
  std::vector<std::string> imports;
  RawNode root;
};

// Post-symbolize node: ordered children, a symbol id, and the two sampling
// flags. z marks a fragment boundary (this node roots a fragment).
struct TreeNode {
  SymbolId symbol = -1;
  bool z = false;
  bool frozen = false;
  std::string leaf_text;
  std::vector<TreeNode> children;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const TreeNode&) const = default;
};

struct SourceTree {
  std::string path;
  std::vector<std::string> imports;
  TreeNode root;
};

std::size_t count_nodes(const TreeNode& n);

void for_each_node(TreeNode& n, const std::function<void(TreeNode&)>& fn);
void for_each_node(const TreeNode& n, const std::function<void(const TreeNode&)>& fn);

void remap_symbols(TreeNode& n, const std::vector<SymbolId>& remap);

// Flat preorder view of one tree; nodes stay owned by the tree.
struct TreeIndex {
  std::vector<TreeNode*> nodes;  // preorder
  std::vector<int> parent;       // -1 for root
};

TreeIndex build_index(TreeNode& root);

}  // namespace haggis
