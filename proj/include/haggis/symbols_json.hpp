#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "haggis/symbols.hpp"

namespace haggis {

const char* symbol_role_name(SymbolRole r);
SymbolRole symbol_role_from_name(const std::string& s, const std::string& context);

nlohmann::ordered_json symbol_table_to_json(const SymbolTable& table);

// Interns the stored entries (ids must be dense and in order) into `table`,
// returning the stored-id -> table-id remap. Identity when `table` was empty.
std::vector<SymbolId> symbol_table_from_json(const nlohmann::ordered_json& symbols,
                                             SymbolTable& table, const std::string& context);

}  // namespace haggis
