#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace haggis {

using SymbolId = std::int32_t;

enum class SymbolRole { Plain, Group, BinDummy, MetaVar };

// A symbol is the grammar-level identity of a tree node: node kind plus its
// simple (string-valued) properties, canonically printed. Property-group heads,
// binarization dummies and metavariables are symbols too.
struct SymbolInfo {
  std::string text;      // canonical, unique
  std::string category;  // kind; groups "Kind::prop"; dummies "Kind::prop..."
  SymbolRole role = SymbolRole::Plain;
  bool terminal = true;  // flipped once the symbol is seen with children

  std::string kind;  // plain/metavar: node kind; group/dummy: parent kind
  std::string prop;  // group/dummy: property name; metavar: declared type
  std::vector<std::pair<std::string, std::string>> props;  // plain: sorted
};

class SymbolTable {
 public:
  SymbolId intern_node(const std::string& kind,
                       std::vector<std::pair<std::string, std::string>> sortedProps);
  SymbolId group_symbol(const std::string& parentKind, const std::string& prop);
  SymbolId dummy_symbol(const std::string& parentKind, const std::string& prop);
  SymbolId metavar_symbol(const std::string& type);

  // Interns a symbol from its stored fields (persistence, table merge).
  SymbolId intern_info(const SymbolInfo& info);

  void note_internal(SymbolId id) { infos_[id].terminal = false; }

  const SymbolInfo& info(SymbolId id) const { return infos_[id]; }
  SymbolId find(const std::string& text) const;  // -1 if absent
  std::size_t size() const { return infos_.size(); }

  // Canonical text of a plain node symbol: Kind or Kind[k=v,...], props sorted
  // by name, with \ [ ] , = escaped in values.
  static std::string node_text(const std::string& kind,
                               const std::vector<std::pair<std::string, std::string>>& sortedProps);

 private:
  SymbolId add(SymbolInfo info);

  std::vector<SymbolInfo> infos_;
  std::unordered_map<std::string, SymbolId> by_text_;
};

// Appends `from` into `into`, returning the id remap table (from-id -> into-id).
std::vector<SymbolId> merge_symbol_tables(SymbolTable& into, const SymbolTable& from);

}  // namespace haggis
