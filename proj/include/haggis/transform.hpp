#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "haggis/tree.hpp"

namespace haggis {

using TypeMap = std::unordered_map<std::string, std::string>;

// Freeze entries are node categories. "CAT" freezes nodes of that category;
// "CAT/*" freezes the children of every CAT node (looking through binarization
// dummies, which get frozen along the way).
struct TransformOptions {
  std::vector<std::string> freeze_categories;
  std::vector<std::string> prune_categories = {"Import"};
  bool insert_metavars = true;
  std::vector<std::string> name_categories = {"SimpleName"};
  std::string name_prop = "id";
  std::string decl_kind = "Decl";
  std::string decl_type_prop = "type";
  std::string decl_name_prop = "name";
  std::string import_name_prop = "name";  // read off pruned subtrees
};

// Freeze list covering the demo language: call/constructor arguments,
// condition/init/update children of if/while/for, infix/paren/postfix
// expressions and declaration statements are glued to their parents.
TransformOptions default_demo_options();

// Child property groups become explicit head nodes (category "Kind::prop");
// empty child lists are dropped. Leaf texts and prop-bearing kinds turn into
// canonical symbols.
TreeNode symbolize(const RawNode& raw, SymbolTable& table);

// Right-leaning binarization of property groups with three or more children;
// dummies have exactly two children. debinarize is its exact inverse.
void binarize(TreeNode& node, SymbolTable& table);
void debinarize(TreeNode& node, const SymbolTable& table);

// name -> declared type, first declaration wins.
TypeMap derive_type_map(const TreeNode& root, const SymbolTable& table,
                        const TransformOptions& opt);

// Wraps each variable-name leaf in a MetaVariable[type=T] node (T = "?" when
// the name has no declared type).
void insert_metavariables(TreeNode& node, const TypeMap& typeOf,
                          const TransformOptions& opt, SymbolTable& table);

// Removes import subtrees, applies the freeze list, pins root z=1.
void prune_and_freeze(SourceTree& tree, const TransformOptions& opt, SymbolTable& table);

SourceTree transform_tree(const RawTree& raw, const TransformOptions& opt, SymbolTable& table);

// Full pipeline over a corpus. The parallel path transforms files with
// per-file symbol tables and merges them in corpus order, so its output is
// identical to the serial path for any thread count.
std::vector<SourceTree> transform_corpus(const std::vector<RawTree>& corpus,
                                         const TransformOptions& opt, SymbolTable& table,
                                         bool parallel = false);

}  // namespace haggis
