#include "haggis/idioms.hpp"

#include <algorithm>
#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

#include "haggis/demo_lang.hpp"
#include "haggis/symbols_json.hpp"
#include "haggis/util.hpp"

namespace haggis {

IdiomSet extract_idioms(const std::vector<PosteriorSample>& samples, long cMin, long nMin,
                        const SymbolTable& table) {
  if (samples.empty()) throw usage_error("no posterior samples to extract idioms from");

  struct Agg {
    long count = 0;
    std::unordered_set<int> files;
  };
  std::unordered_map<Fragment, Agg, FragmentHash> agg;
  for (const auto& s : samples) {
    for (const auto& [frag, tree] : s.fragments) {
      Agg& a = agg[frag];
      ++a.count;
      a.files.insert(tree);
    }
  }

  IdiomSet set;
  set.cmin = cMin;
  set.nmin = nMin;
  for (auto& [frag, a] : agg) {
    if (a.count < cMin) continue;
    if (content_node_count(frag, table) < nMin) continue;
    Idiom idiom;
    idiom.fragment = frag;
    idiom.sample_count = a.count;
    idiom.file_count = static_cast<long>(a.files.size());
    set.idioms.push_back(std::move(idiom));
  }
  std::sort(set.idioms.begin(), set.idioms.end(), [&](const Idiom& x, const Idiom& y) {
    if (x.file_count != y.file_count) return x.file_count > y.file_count;
    if (x.sample_count != y.sample_count) return x.sample_count > y.sample_count;
    int sx = content_node_count(x.fragment, table);
    int sy = content_node_count(y.fragment, table);
    if (sx != sy) return sx > sy;
    return x.fragment.code < y.fragment.code;
  });
  return set;
}

std::string render_template(const Fragment& idiom, const SymbolTable& table) {
  return demo::render_node(fragment_to_tree(idiom), table);
}

namespace {

using Json = nlohmann::ordered_json;

Json fragment_node_to_json(const TreeNode& n, const SymbolTable& table) {
  Json j = Json::object();
  j["symbol"] = table.info(n.symbol).text;
  // A nonterminal leaf is a substitution site; record that so a fresh table
  // renders the reloaded idiom identically.
  if (n.children.empty() && !table.info(n.symbol).terminal) j["site"] = true;
  Json kids = Json::array();
  for (const auto& c : n.children) kids.push_back(fragment_node_to_json(c, table));
  j["children"] = std::move(kids);
  return j;
}

TreeNode fragment_node_from_json(const Json& j, SymbolTable& table, const std::string& context) {
  if (!j.is_object() || !j.contains("symbol") || !j["symbol"].is_string())
    throw schema_error(context + ": fragment node needs a string 'symbol'");
  TreeNode n;
  n.symbol = parse_symbol_text(table, j["symbol"].get<std::string>());
  if (j.value("site", false)) table.note_internal(n.symbol);
  if (j.contains("children")) {
    if (!j["children"].is_array())
      throw schema_error(context + ": fragment children must be an array");
    for (const auto& c : j["children"])
      n.children.push_back(fragment_node_from_json(c, table, context));
  }
  if (!n.children.empty()) table.note_internal(n.symbol);
  return n;
}

// Splits "k=v,k=v" honoring backslash escapes in values.
std::vector<std::pair<std::string, std::string>> parse_props(const std::string& body,
                                                             const std::string& text) {
  std::vector<std::pair<std::string, std::string>> props;
  std::string key, val;
  bool inKey = true;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '\\' && i + 1 < body.size()) {
      (inKey ? key : val) += body[++i];
      continue;
    }
    if (inKey && c == '=') {
      inKey = false;
    } else if (!inKey && c == ',') {
      props.emplace_back(std::move(key), std::move(val));
      key.clear();
      val.clear();
      inKey = true;
    } else {
      (inKey ? key : val) += c;
    }
  }
  if (inKey && !key.empty()) throw schema_error("bad symbol text '" + text + "'");
  if (!inKey) props.emplace_back(std::move(key), std::move(val));
  return props;
}

}  // namespace

SymbolId parse_symbol_text(SymbolTable& table, const std::string& text) {
  SymbolId existing = table.find(text);
  if (existing >= 0) return existing;
  if (text.empty()) throw schema_error("empty symbol text");

  std::size_t sep = text.find("::");
  if (sep != std::string::npos) {
    std::string kind = text.substr(0, sep);
    std::string rest = text.substr(sep + 2);
    if (rest.size() > 3 && rest.compare(rest.size() - 3, 3, "...") == 0)
      return table.dummy_symbol(kind, rest.substr(0, rest.size() - 3));
    return table.group_symbol(kind, rest);
  }

  std::size_t br = text.find('[');
  if (br == std::string::npos) {
    if (text.back() == ']') throw schema_error("bad symbol text '" + text + "'");
    return table.intern_node(text, {});
  }
  if (text.back() != ']') throw schema_error("bad symbol text '" + text + "'");
  std::string kind = text.substr(0, br);
  auto props = parse_props(text.substr(br + 1, text.size() - br - 2), text);
  if (kind == "MetaVariable" && props.size() == 1 && props[0].first == "type")
    return table.metavar_symbol(props[0].second);
  return table.intern_node(kind, std::move(props));
}

void save_idiom_set(const std::string& path, const IdiomSet& set, const SymbolTable& table) {
  Json j = Json::object();
  j["version"] = 1;
  Json cfg = Json::object();
  cfg["alpha"] = set.alpha;
  cfg["pstop"] = set.pstop;
  cfg["cmin"] = set.cmin;
  cfg["nmin"] = set.nmin;
  cfg["seed"] = set.seed;
  j["config"] = std::move(cfg);
  j["provenance"] = set.provenance;
  Json idioms = Json::array();
  for (const auto& idiom : set.idioms) {
    Json e = Json::object();
    e["template"] = render_template(idiom.fragment, table);
    e["fragment"] = fragment_node_to_json(fragment_to_tree(idiom.fragment), table);
    e["sampleCount"] = idiom.sample_count;
    e["fileCount"] = idiom.file_count;
    idioms.push_back(std::move(e));
  }
  j["idioms"] = std::move(idioms);
  write_file(path, j.dump(2) + "\n");
}

IdiomSet load_idiom_set(const std::string& path, SymbolTable& table) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw schema_error(path + ": invalid idiom set JSON");
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw schema_error(path + ": unsupported idiom set version");

  IdiomSet set;
  const Json& cfg = j.at("config");
  set.alpha = cfg.at("alpha").get<double>();
  set.pstop = cfg.at("pstop").get<double>();
  set.cmin = cfg.at("cmin").get<long>();
  set.nmin = cfg.at("nmin").get<long>();
  set.seed = cfg.at("seed").get<std::uint64_t>();
  set.provenance = j.value("provenance", std::string());

  if (!j.contains("idioms") || !j["idioms"].is_array())
    throw schema_error(path + ": missing idioms array");
  for (const auto& e : j["idioms"]) {
    Idiom idiom;
    TreeNode t = fragment_node_from_json(e.at("fragment"), table, path);
    idiom.fragment = fragment_from_tree(t);
    idiom.sample_count = e.at("sampleCount").get<long>();
    idiom.file_count = e.at("fileCount").get<long>();
    set.idioms.push_back(std::move(idiom));
  }
  return set;
}

void save_samples(const std::string& path, const std::vector<PosteriorSample>& samples,
                  const SymbolTable& table) {
  Json j = Json::object();
  j["version"] = 1;
  j["symbols"] = symbol_table_to_json(table);
  Json arr = Json::array();
  for (const auto& s : samples) {
    Json e = Json::object();
    e["iteration"] = s.iteration;
    Json frags = Json::array();
    for (const auto& [frag, tree] : s.fragments) {
      Json f = Json::object();
      f["code"] = frag.code;
      f["tree"] = tree;
      frags.push_back(std::move(f));
    }
    e["fragments"] = std::move(frags);
    arr.push_back(std::move(e));
  }
  j["samples"] = std::move(arr);
  write_file(path, j.dump() + "\n");
}

std::vector<PosteriorSample> load_samples(const std::string& path, SymbolTable& table) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw schema_error(path + ": invalid samples JSON");
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw schema_error(path + ": unsupported samples version");

  std::vector<SymbolId> remap = symbol_table_from_json(j.at("symbols"), table, path);
  std::vector<PosteriorSample> samples;
  for (const auto& e : j.at("samples")) {
    PosteriorSample s;
    s.iteration = e.at("iteration").get<long>();
    for (const auto& f : e.at("fragments")) {
      Fragment frag;
      const Json& code = f.at("code");
      if (!code.is_array() || code.size() % 2 != 0)
        throw schema_error(path + ": fragment code must be an even-length array");
      frag.code.reserve(code.size());
      for (std::size_t i = 0; i < code.size(); i += 2) {
        auto sym = code[i].get<std::int64_t>();
        if (sym < 0 || static_cast<std::size_t>(sym) >= remap.size())
          throw schema_error(path + ": fragment symbol id out of range");
        frag.code.push_back(remap[sym]);
        frag.code.push_back(code[i + 1].get<std::int32_t>());
      }
      s.fragments.emplace_back(std::move(frag), f.at("tree").get<int>());
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace haggis
