#include "haggis/transform.hpp"

#include <algorithm>
#include <omp.h>

#include "haggis/util.hpp"

namespace haggis {

TransformOptions default_demo_options() {
  TransformOptions opt;
  opt.freeze_categories = {
      "Call::args",   "Call::args/*",   "New::args",    "New::args/*",
      "If::cond",     "If::cond/*",     "While::cond",  "While::cond/*",
      "For::init",    "For::init/*",    "For::cond",    "For::cond/*",
      "For::update",  "For::update/*",  "Infix",        "Paren",
      "Postfix",      "Decl",
  };
  return opt;
}

TreeNode symbolize(const RawNode& raw, SymbolTable& table) {
  TreeNode n;
  auto props = raw.props;
  std::sort(props.begin(), props.end());
  n.symbol = table.intern_node(raw.kind, std::move(props));
  if (raw.has_text) n.leaf_text = raw.text;

  for (const auto& [prop, kids] : raw.children) {
    if (kids.empty()) continue;
    TreeNode group;
    group.symbol = table.group_symbol(raw.kind, prop);
    for (const auto& kid : kids) group.children.push_back(symbolize(kid, table));
    table.note_internal(group.symbol);
    n.children.push_back(std::move(group));
  }
  if (!n.children.empty()) table.note_internal(n.symbol);
  return n;
}

void binarize(TreeNode& node, SymbolTable& table) {
  for (auto& c : node.children) binarize(c, table);
  const SymbolInfo& info = table.info(node.symbol);
  if (info.role != SymbolRole::Group || node.children.size() < 3) return;

  SymbolId dummy = table.dummy_symbol(info.kind, info.prop);
  table.note_internal(dummy);
  auto kids = std::move(node.children);
  TreeNode chain = std::move(kids.back());
  for (std::size_t i = kids.size() - 1; i-- > 1;) {
    TreeNode d;
    d.symbol = dummy;
    d.children.push_back(std::move(kids[i]));
    d.children.push_back(std::move(chain));
    chain = std::move(d);
  }
  node.children.clear();
  node.children.push_back(std::move(kids[0]));
  node.children.push_back(std::move(chain));
}

namespace {

void splice(TreeNode&& child, const SymbolTable& table, std::vector<TreeNode>& out) {
  if (table.info(child.symbol).role == SymbolRole::BinDummy) {
    for (auto& grand : child.children) splice(std::move(grand), table, out);
  } else {
    out.push_back(std::move(child));
  }
}

}  // namespace

void debinarize(TreeNode& node, const SymbolTable& table) {
  std::vector<TreeNode> flat;
  for (auto& c : node.children) splice(std::move(c), table, flat);
  node.children = std::move(flat);
  for (auto& c : node.children) debinarize(c, table);
}

namespace {

const std::string* prop_value(const SymbolInfo& info, const std::string& key) {
  for (const auto& [k, v] : info.props)
    if (k == key) return &v;
  return nullptr;
}

std::string leaf_name(const TreeNode& leaf, const SymbolTable& table, const std::string& nameProp) {
  if (const auto* v = prop_value(table.info(leaf.symbol), nameProp)) return *v;
  return leaf.leaf_text;
}

}  // namespace

TypeMap derive_type_map(const TreeNode& root, const SymbolTable& table,
                        const TransformOptions& opt) {
  TypeMap types;
  for_each_node(root, [&](const TreeNode& n) {
    const SymbolInfo& info = table.info(n.symbol);
    if (info.role != SymbolRole::Plain || info.kind != opt.decl_kind) return;
    const auto* ty = prop_value(info, opt.decl_type_prop);
    if (!ty) return;
    for (const auto& g : n.children) {
      const SymbolInfo& gi = table.info(g.symbol);
      if (gi.role != SymbolRole::Group || gi.prop != opt.decl_name_prop) continue;
      if (g.children.empty()) continue;
      std::string name = leaf_name(g.children.front(), table, opt.name_prop);
      if (!name.empty()) types.emplace(name, *ty);
    }
  });
  return types;
}

void insert_metavariables(TreeNode& node, const TypeMap& typeOf,
                          const TransformOptions& opt, SymbolTable& table) {
  for (auto& c : node.children) {
    const SymbolInfo& info = table.info(c.symbol);
    bool nameLeaf = c.is_leaf() &&
                    std::find(opt.name_categories.begin(), opt.name_categories.end(),
                              info.category) != opt.name_categories.end();
    if (nameLeaf) {
      std::string name = leaf_name(c, table, opt.name_prop);
      auto it = typeOf.find(name);
      TreeNode wrapper;
      wrapper.symbol = table.metavar_symbol(it == typeOf.end() ? "?" : it->second);
      table.note_internal(wrapper.symbol);
      wrapper.children.push_back(std::move(c));
      c = std::move(wrapper);
    } else {
      insert_metavariables(c, typeOf, opt, table);
    }
  }
}

namespace {

void freeze_node(TreeNode& n) {
  n.frozen = true;
  n.z = false;
}

void freeze_children_through_dummies(TreeNode& n, const SymbolTable& table) {
  for (auto& c : n.children) {
    freeze_node(c);
    if (table.info(c.symbol).role == SymbolRole::BinDummy)
      freeze_children_through_dummies(c, table);
  }
}

// The name a pruned subtree contributes to SourceTree.imports.
std::string pruned_name(const TreeNode& n, const SymbolTable& table,
                        const TransformOptions& opt) {
  if (const auto* v = prop_value(table.info(n.symbol), opt.import_name_prop)) return *v;
  return n.leaf_text;
}

// Bottom-up removal. Dummies left with one child are spliced out and groups
// or dummies left childless disappear, so the binarization invariants survive
// pruning inside chains.
void prune_rec(TreeNode& n, const TransformOptions& opt, const SymbolTable& table,
               std::vector<std::string>& pruned) {
  for (auto& c : n.children) prune_rec(c, opt, table, pruned);
  std::erase_if(n.children, [&](const TreeNode& c) {
    const auto& cat = table.info(c.symbol).category;
    if (std::find(opt.prune_categories.begin(), opt.prune_categories.end(), cat) ==
        opt.prune_categories.end())
      return false;
    std::string name = pruned_name(c, table, opt);
    if (!name.empty()) pruned.push_back(std::move(name));
    return true;
  });
  std::vector<TreeNode> fixed;
  for (auto& c : n.children) {
    SymbolRole role = table.info(c.symbol).role;
    if (role == SymbolRole::BinDummy) {
      if (c.children.empty()) continue;
      if (c.children.size() == 1) {
        fixed.push_back(std::move(c.children.front()));
        continue;
      }
    }
    if (role == SymbolRole::Group && c.is_leaf()) continue;
    fixed.push_back(std::move(c));
  }
  n.children = std::move(fixed);
}

}  // namespace

void prune_and_freeze(SourceTree& tree, const TransformOptions& opt, SymbolTable& table) {
  std::vector<std::string> pruned;
  prune_rec(tree.root, opt, table, pruned);
  for (auto& name : pruned)
    if (std::find(tree.imports.begin(), tree.imports.end(), name) == tree.imports.end())
      tree.imports.push_back(std::move(name));

  for (const auto& entry : opt.freeze_categories) {
    bool starred = entry.size() > 2 && entry.ends_with("/*");
    std::string cat = starred ? entry.substr(0, entry.size() - 2) : entry;
    for_each_node(tree.root, [&](TreeNode& n) {
      if (table.info(n.symbol).category != cat) return;
      if (starred)
        freeze_children_through_dummies(n, table);
      else
        freeze_node(n);
    });
  }

  for_each_node(tree.root, [](TreeNode& n) {
    if (n.is_leaf()) n.z = false;
  });
  tree.root.frozen = false;
  tree.root.z = true;
}

SourceTree transform_tree(const RawTree& raw, const TransformOptions& opt, SymbolTable& table) {
  SourceTree t;
  t.path = raw.path;
  t.imports = raw.imports;
  t.root = symbolize(raw.root, table);
  binarize(t.root, table);
  if (opt.insert_metavars) {
    TypeMap types = derive_type_map(t.root, table, opt);
    insert_metavariables(t.root, types, opt, table);
  }
  prune_and_freeze(t, opt, table);
  if (t.root.is_leaf())
    throw schema_error("tree " + t.path + ": no content after transform");
  return t;
}

std::vector<SourceTree> transform_corpus(const std::vector<RawTree>& corpus,
                                         const TransformOptions& opt, SymbolTable& table,
                                         bool parallel) {
  std::vector<SourceTree> out(corpus.size());
  if (!parallel) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      out[i] = transform_tree(corpus[i], opt, table);
  } else {
    std::vector<SymbolTable> locals(corpus.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      try {
        out[i] = transform_tree(corpus[i], opt, locals[i]);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    // Corpus-order merge keeps symbol ids independent of the thread count.
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto remap = merge_symbol_tables(table, locals[i]);
      remap_symbols(out[i].root, remap);
    }
  }
  if (!out.empty()) {
    SymbolId start = out.front().root.symbol;
    for (const auto& t : out)
      if (t.root.symbol != start)
        throw schema_error("tree " + t.path + ": root symbol differs from corpus start symbol");
  }
  return out;
}

}  // namespace haggis
