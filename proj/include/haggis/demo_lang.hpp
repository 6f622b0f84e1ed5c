#pragma once

#include <string>
#include <vector>

#include "haggis/tree.hpp"

namespace haggis::demo {

// Small Java-like language the shipped corpora are written in: imports,
// blocks, if/while/for, try-finally, declarations, assignments, calls with
// receivers, new-expressions, int/string/null literals. Files use ".dl".
//
// Templates produced by the renderer parse too: $BODY$, $..., $name, $(Type)
// and $word are hole tokens, kept verbatim as Hole nodes.

RawTree parse_source(const std::string& source, const std::string& path);

// Statement/expression list, for re-parsing rendered idiom templates.
std::vector<RawNode> parse_template(const std::string& source);

// Renders a symbolized (possibly transformed, possibly partial) tree back to
// one-line source. Nonterminal leaves print as holes; terminal content prints
// from symbol properties, so fragment trees render without leaf texts.
std::string render_node(const TreeNode& node, const SymbolTable& table);

// Parses every *.dl under dir (recursively); paths relative to dir, sorted.
std::vector<RawTree> parse_directory(const std::string& dir);

}  // namespace haggis::demo
