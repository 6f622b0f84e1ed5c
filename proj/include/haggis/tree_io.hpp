#pragma once

#include <string>
#include <vector>

#include "haggis/tree.hpp"

namespace haggis {

// Corpus interchange format: one JSON record per line,
//   {"version":1,"path":"a/b.dl","imports":["x.y"],"root":{...}}
// with nodes {"kind":K,"props":{...},"children":{"prop":[...]},"text":T};
// props, children and text are optional. Key order of props/children is
// significant and preserved.

std::vector<RawTree> parse_corpus_jsonl(const std::string& content);
std::vector<RawTree> ingest_corpus(const std::string& jsonlPath);

std::string corpus_to_jsonl(const std::vector<RawTree>& trees);
void write_corpus_jsonl(const std::string& path, const std::vector<RawTree>& trees);

}  // namespace haggis
