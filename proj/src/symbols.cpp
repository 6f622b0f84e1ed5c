#include "haggis/symbols.hpp"

#include "haggis/util.hpp"

namespace haggis {

namespace {

void append_escaped(std::string& out, const std::string& v) {
  for (char c : v) {
    if (c == '\\' || c == '[' || c == ']' || c == ',' || c == '=') out.push_back('\\');
    out.push_back(c);
  }
}

}  // namespace

std::string SymbolTable::node_text(
    const std::string& kind, const std::vector<std::pair<std::string, std::string>>& sortedProps) {
  if (sortedProps.empty()) return kind;
  std::string out = kind;
  out.push_back('[');
  bool first = true;
  for (const auto& [k, v] : sortedProps) {
    if (!first) out.push_back(',');
    first = false;
    out += k;
    out.push_back('=');
    append_escaped(out, v);
  }
  out.push_back(']');
  return out;
}

SymbolId SymbolTable::add(SymbolInfo info) {
  auto it = by_text_.find(info.text);
  if (it != by_text_.end()) return it->second;
  SymbolId id = static_cast<SymbolId>(infos_.size());
  by_text_.emplace(info.text, id);
  infos_.push_back(std::move(info));
  return id;
}

SymbolId SymbolTable::intern_node(const std::string& kind,
                                  std::vector<std::pair<std::string, std::string>> sortedProps) {
  SymbolInfo info;
  info.text = node_text(kind, sortedProps);
  info.category = kind;
  info.role = SymbolRole::Plain;
  info.kind = kind;
  info.props = std::move(sortedProps);
  return add(std::move(info));
}

SymbolId SymbolTable::group_symbol(const std::string& parentKind, const std::string& prop) {
  SymbolInfo info;
  info.text = parentKind + "::" + prop;
  info.category = info.text;
  info.role = SymbolRole::Group;
  info.kind = parentKind;
  info.prop = prop;
  return add(std::move(info));
}

SymbolId SymbolTable::dummy_symbol(const std::string& parentKind, const std::string& prop) {
  SymbolInfo info;
  info.text = parentKind + "::" + prop + "...";
  info.category = info.text;
  info.role = SymbolRole::BinDummy;
  info.kind = parentKind;
  info.prop = prop;
  return add(std::move(info));
}

SymbolId SymbolTable::metavar_symbol(const std::string& type) {
  SymbolInfo info;
  info.text = node_text("MetaVariable", {{"type", type}});
  info.category = "MetaVariable";
  info.role = SymbolRole::MetaVar;
  info.kind = "MetaVariable";
  info.prop = type;
  info.props = {{"type", type}};
  return add(std::move(info));
}

SymbolId SymbolTable::intern_info(const SymbolInfo& info) {
  auto it = by_text_.find(info.text);
  if (it != by_text_.end()) {
    if (!info.terminal) infos_[it->second].terminal = false;
    return it->second;
  }
  SymbolId id = static_cast<SymbolId>(infos_.size());
  by_text_.emplace(info.text, id);
  infos_.push_back(info);
  return id;
}

SymbolId SymbolTable::find(const std::string& text) const {
  auto it = by_text_.find(text);
  return it == by_text_.end() ? -1 : it->second;
}

std::vector<SymbolId> merge_symbol_tables(SymbolTable& into, const SymbolTable& from) {
  std::vector<SymbolId> remap(from.size());
  for (std::size_t i = 0; i < from.size(); ++i)
    remap[i] = into.intern_info(from.info(static_cast<SymbolId>(i)));
  return remap;
}

}  // namespace haggis
