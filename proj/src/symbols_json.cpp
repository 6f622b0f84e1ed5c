#include "haggis/symbols_json.hpp"

#include "haggis/util.hpp"

namespace haggis {

namespace {
using Json = nlohmann::ordered_json;
}

const char* symbol_role_name(SymbolRole r) {
  switch (r) {
    case SymbolRole::Plain: return "plain";
    case SymbolRole::Group: return "group";
    case SymbolRole::BinDummy: return "dummy";
    case SymbolRole::MetaVar: return "metavar";
  }
  return "plain";
}

SymbolRole symbol_role_from_name(const std::string& s, const std::string& context) {
  if (s == "plain") return SymbolRole::Plain;
  if (s == "group") return SymbolRole::Group;
  if (s == "dummy") return SymbolRole::BinDummy;
  if (s == "metavar") return SymbolRole::MetaVar;
  throw schema_error(context + ": unknown symbol role '" + s + "'");
}

Json symbol_table_to_json(const SymbolTable& table) {
  Json syms = Json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const SymbolInfo& info = table.info(static_cast<SymbolId>(i));
    Json s = Json::object();
    s["id"] = i;
    s["text"] = info.text;
    s["category"] = info.category;
    s["role"] = symbol_role_name(info.role);
    s["terminal"] = info.terminal;
    s["kind"] = info.kind;
    s["prop"] = info.prop;
    Json props = Json::array();
    for (const auto& [k, v] : info.props) props.push_back(Json::array({k, v}));
    s["props"] = std::move(props);
    syms.push_back(std::move(s));
  }
  return syms;
}

std::vector<SymbolId> symbol_table_from_json(const Json& symbols, SymbolTable& table,
                                             const std::string& context) {
  if (!symbols.is_array()) throw schema_error(context + ": symbols must be an array");
  std::vector<SymbolId> remap;
  remap.reserve(symbols.size());
  std::size_t pos = 0;
  for (const auto& s : symbols) {
    SymbolInfo info;
    info.text = s.at("text").get<std::string>();
    info.category = s.at("category").get<std::string>();
    info.role = symbol_role_from_name(s.at("role").get<std::string>(), context);
    info.terminal = s.at("terminal").get<bool>();
    info.kind = s.at("kind").get<std::string>();
    info.prop = s.at("prop").get<std::string>();
    for (const auto& kv : s.at("props"))
      info.props.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    if (s.at("id").get<std::size_t>() != pos)
      throw schema_error(context + ": symbol ids are not dense/ordered");
    remap.push_back(table.intern_info(info));
    ++pos;
  }
  return remap;
}

}  // namespace haggis
