#include "haggis/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "haggis/symbols_json.hpp"
#include "haggis/util.hpp"

namespace haggis {

void Pcfg::add_rule(Production p, long count) {
  auto it = index_.find(p);
  if (it != index_.end()) {
    counts_[it->second] += count;
    return;
  }
  index_.emplace(p, static_cast<int>(prods_.size()));
  prods_.push_back(std::move(p));
  counts_.push_back(count);
}

void Pcfg::finalize() {
  std::vector<int> order(prods_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return prods_[a] < prods_[b]; });

  std::vector<Production> prods;
  std::vector<long> counts;
  prods.reserve(prods_.size());
  counts.reserve(counts_.size());
  for (int i : order) {
    prods.push_back(std::move(prods_[i]));
    counts.push_back(counts_[i]);
  }
  prods_ = std::move(prods);
  counts_ = std::move(counts);

  index_.clear();
  SymbolId maxSym = start;
  for (std::size_t i = 0; i < prods_.size(); ++i) {
    index_.emplace(prods_[i], static_cast<int>(i));
    maxSym = std::max(maxSym, prods_[i].lhs);
    for (SymbolId s : prods_[i].rhs) maxSym = std::max(maxSym, s);
  }

  spans_.assign(static_cast<std::size_t>(maxSym) + 1, {0, 0});
  std::vector<long> totals(static_cast<std::size_t>(maxSym) + 1, 0);
  for (std::size_t i = 0; i < prods_.size(); ++i) {
    SymbolId l = prods_[i].lhs;
    if (spans_[l].second == 0) spans_[l].first = static_cast<int>(i);
    spans_[l].second = static_cast<int>(i) + 1;
    totals[l] += counts_[i];
  }

  probs_.resize(prods_.size());
  log_probs_.resize(prods_.size());
  for (std::size_t i = 0; i < prods_.size(); ++i) {
    if (counts_[i] <= 0) throw state_error("rule with nonpositive count");
    probs_[i] = static_cast<double>(counts_[i]) / static_cast<double>(totals[prods_[i].lhs]);
    log_probs_[i] = std::log(probs_[i]);
  }
  totals_ = std::move(totals);
}

int Pcfg::find(const Production& p) const {
  auto it = index_.find(p);
  return it == index_.end() ? -1 : it->second;
}

int Pcfg::find(SymbolId lhs, const std::vector<SymbolId>& rhs) const {
  Production p{lhs, rhs};
  return find(p);
}

bool Pcfg::is_nonterminal(SymbolId s) const {
  return s >= 0 && static_cast<std::size_t>(s) < spans_.size() &&
         spans_[s].second > spans_[s].first;
}

long Pcfg::lhs_total(SymbolId s) const {
  if (s < 0 || static_cast<std::size_t>(s) >= totals_.size()) return 0;
  return totals_[s];
}

std::pair<int, int> Pcfg::rules_for(SymbolId lhs) const {
  if (!is_nonterminal(lhs)) return {0, 0};
  return spans_[lhs];
}

int Pcfg::sample_rule(SymbolId lhs, Rng& rng) const {
  auto [b, e] = rules_for(lhs);
  if (b == e) throw state_error("sample_rule on terminal symbol");
  double r = rng.uniform01();
  for (int i = b; i < e - 1; ++i) {
    r -= probs_[i];
    if (r < 0) return i;
  }
  return e - 1;
}

Pcfg estimate_pcfg(const std::vector<SourceTree>& corpus) {
  if (corpus.empty()) throw state_error("estimate_pcfg: empty corpus");
  Pcfg g;
  g.start = corpus.front().root.symbol;
  for (const auto& t : corpus) {
    for_each_node(t.root, [&](const TreeNode& n) {
      if (n.is_leaf()) return;
      Production p;
      p.lhs = n.symbol;
      p.rhs.reserve(n.children.size());
      for (const auto& c : n.children) p.rhs.push_back(c.symbol);
      g.add_rule(std::move(p), 1);
    });
  }
  g.finalize();
  return g;
}

namespace {
using Json = nlohmann::ordered_json;
}

void save_grammar(const std::string& path, const Pcfg& pcfg, const SymbolTable& table) {
  Json j = Json::object();
  j["version"] = 1;
  j["start"] = pcfg.start;
  j["symbols"] = symbol_table_to_json(table);
  Json rules = Json::array();
  for (std::size_t i = 0; i < pcfg.rule_count(); ++i) {
    const Production& p = pcfg.production(static_cast<int>(i));
    Json r = Json::object();
    r["lhs"] = p.lhs;
    r["rhs"] = p.rhs;
    r["count"] = pcfg.count(static_cast<int>(i));
    r["prob"] = pcfg.prob(static_cast<int>(i));
    rules.push_back(std::move(r));
  }
  j["rules"] = std::move(rules);
  write_file(path, j.dump(2) + "\n");
}

LoadedGrammar load_grammar(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw schema_error(path + ": invalid grammar JSON");
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw schema_error(path + ": unsupported grammar version");

  LoadedGrammar out;
  if (!j.contains("symbols")) throw schema_error(path + ": missing symbols");
  symbol_table_from_json(j["symbols"], out.table, path);

  out.pcfg.start = j.at("start").get<SymbolId>();
  if (!j.contains("rules") || !j["rules"].is_array()) throw schema_error(path + ": missing rules");
  for (const auto& r : j["rules"]) {
    Production p;
    p.lhs = r.at("lhs").get<SymbolId>();
    for (const auto& s : r.at("rhs")) p.rhs.push_back(s.get<SymbolId>());
    long count = r.at("count").get<long>();
    if (count <= 0) throw schema_error(path + ": rule count must be positive");
    out.pcfg.add_rule(std::move(p), count);
  }
  out.pcfg.finalize();
  // Stored probabilities are redundant; verify they match the counts exactly.
  std::size_t i = 0;
  for (const auto& r : j["rules"]) {
    Production p;
    p.lhs = r.at("lhs").get<SymbolId>();
    for (const auto& s : r.at("rhs")) p.rhs.push_back(s.get<SymbolId>());
    int idx = out.pcfg.find(p);
    if (idx < 0 || out.pcfg.prob(idx) != r.at("prob").get<double>())
      throw schema_error(path + ": stored prob disagrees with counts at rule " +
                         std::to_string(i));
    ++i;
  }
  return out;
}

}  // namespace haggis
