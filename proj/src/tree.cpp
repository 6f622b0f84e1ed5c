#include "haggis/tree.hpp"

namespace haggis {

std::size_t count_nodes(const TreeNode& n) {
  std::size_t total = 1;
  for (const auto& c : n.children) total += count_nodes(c);
  return total;
}

void for_each_node(TreeNode& n, const std::function<void(TreeNode&)>& fn) {
  fn(n);
  for (auto& c : n.children) for_each_node(c, fn);
}

void for_each_node(const TreeNode& n, const std::function<void(const TreeNode&)>& fn) {
  fn(n);
  for (const auto& c : n.children) for_each_node(c, fn);
}

void remap_symbols(TreeNode& n, const std::vector<SymbolId>& remap) {
  n.symbol = remap[n.symbol];
  for (auto& c : n.children) remap_symbols(c, remap);
}

TreeIndex build_index(TreeNode& root) {
  TreeIndex idx;
  // Iterative preorder so deep trees do not depend on stack depth here.
  std::vector<std::pair<TreeNode*, int>> stack{{&root, -1}};
  while (!stack.empty()) {
    auto [node, par] = stack.back();
    stack.pop_back();
    int id = static_cast<int>(idx.nodes.size());
    idx.nodes.push_back(node);
    idx.parent.push_back(par);
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it)
      stack.emplace_back(&*it, id);
  }
  return idx;
}

}  // namespace haggis
