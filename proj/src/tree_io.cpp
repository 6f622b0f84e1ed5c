#include "haggis/tree_io.hpp"

#include <json.hpp>

#include "haggis/util.hpp"

namespace haggis {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(std::size_t record, const std::string& where, const std::string& what) {
  throw schema_error("record " + std::to_string(record) + ": " + where + ": " + what);
}

void check_name(std::size_t record, const std::string& where, const std::string& name) {
  if (name.empty()) fail(record, where, "empty name");
  if (name.find("::") != std::string::npos) fail(record, where, "name contains reserved '::'");
  if (name.back() == '.') fail(record, where, "name ends with '.'");
}

RawNode parse_node(const Json& j, std::size_t record, const std::string& where) {
  if (!j.is_object()) fail(record, where, "expected object");
  RawNode n;
  auto kindIt = j.find("kind");
  if (kindIt == j.end() || !kindIt->is_string()) fail(record, where + ".kind", "expected string");
  n.kind = kindIt->get<std::string>();
  check_name(record, where + ".kind", n.kind);

  if (auto it = j.find("props"); it != j.end()) {
    if (!it->is_object()) fail(record, where + ".props", "expected object");
    for (const auto& [k, v] : it->items()) {
      check_name(record, where + ".props." + k, k);
      if (!v.is_string()) fail(record, where + ".props." + k, "expected string value");
      n.props.emplace_back(k, v.get<std::string>());
    }
  }
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_object()) fail(record, where + ".children", "expected object");
    for (const auto& [k, v] : it->items()) {
      check_name(record, where + ".children." + k, k);
      for (const auto& [pk, pv] : n.props)
        if (pk == k) fail(record, where + ".children." + k, "also listed in props");
      if (!v.is_array()) fail(record, where + ".children." + k, "expected array");
      std::vector<RawNode> kids;
      for (std::size_t i = 0; i < v.size(); ++i)
        kids.push_back(parse_node(v[i], record, where + ".children." + k + "[" + std::to_string(i) + "]"));
      n.children.emplace_back(k, std::move(kids));
    }
  }
  if (auto it = j.find("text"); it != j.end()) {
    if (!it->is_string()) fail(record, where + ".text", "expected string");
    n.text = it->get<std::string>();
    n.has_text = true;
  }
  return n;
}

Json node_to_json(const RawNode& n) {
  Json j = Json::object();
  j["kind"] = n.kind;
  if (!n.props.empty()) {
    Json p = Json::object();
    for (const auto& [k, v] : n.props) p[k] = v;
    j["props"] = std::move(p);
  }
  if (!n.children.empty()) {
    Json c = Json::object();
    for (const auto& [k, kids] : n.children) {
      Json arr = Json::array();
      for (const auto& kid : kids) arr.push_back(node_to_json(kid));
      c[k] = std::move(arr);
    }
    j["children"] = std::move(c);
  }
  if (n.has_text) j["text"] = n.text;
  return j;
}

}  // namespace

std::vector<RawTree> parse_corpus_jsonl(const std::string& content) {
  std::vector<RawTree> out;
  std::size_t pos = 0, record = 1;  // records are 1-based in diagnostics
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(record, "line", "invalid JSON");
    if (!j.is_object()) fail(record, "line", "expected object");

    auto ver = j.find("version");
    if (ver == j.end() || !ver->is_number_integer()) fail(record, "version", "expected integer");
    if (ver->get<int>() != 1)
      fail(record, "version", "unsupported version " + std::to_string(ver->get<int>()));

    RawTree t;
    auto pathIt = j.find("path");
    if (pathIt == j.end() || !pathIt->is_string()) fail(record, "path", "expected string");
    t.path = pathIt->get<std::string>();

    if (auto it = j.find("imports"); it != j.end()) {
      if (!it->is_array()) fail(record, "imports", "expected array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_string())
          fail(record, "imports[" + std::to_string(i) + "]", "expected string");
        t.imports.push_back((*it)[i].get<std::string>());
      }
    }

    auto rootIt = j.find("root");
    if (rootIt == j.end()) fail(record, "root", "missing");
    t.root = parse_node(*rootIt, record, "root");
    out.push_back(std::move(t));
    ++record;
  }
  return out;
}

std::vector<RawTree> ingest_corpus(const std::string& jsonlPath) {
  return parse_corpus_jsonl(read_file(jsonlPath));
}

std::string corpus_to_jsonl(const std::vector<RawTree>& trees) {
  std::string out;
  for (const auto& t : trees) {
    Json j = Json::object();
    j["version"] = 1;
    j["path"] = t.path;
    j["imports"] = t.imports;
    j["root"] = node_to_json(t.root);
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

void write_corpus_jsonl(const std::string& path, const std::vector<RawTree>& trees) {
  write_file(path, corpus_to_jsonl(trees));
}

}  // namespace haggis
