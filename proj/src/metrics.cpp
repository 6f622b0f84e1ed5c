#include "haggis/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include "haggis/util.hpp"

namespace haggis {

EvalSummary summarize(const MatchReport& report, const std::vector<Fragment>& idioms,
                      const SymbolTable& table) {
  EvalSummary s;
  for (const auto& fm : report.files) {
    s.covered_nodes += fm.matched_nodes;
    s.total_nodes += fm.total_nodes;
  }
  s.coverage = s.total_nodes > 0
                   ? static_cast<double>(s.covered_nodes) / static_cast<double>(s.total_nodes)
                   : 0.0;

  long found = 0;
  long sizeSum = 0;
  for (std::size_t k = 0; k < idioms.size(); ++k) {
    if (report.file_counts[k] > 0) ++found;
    s.total_matches += report.match_counts[k];
    sizeSum += report.match_counts[k] * content_node_count(idioms[k], table);
  }
  s.precision = idioms.empty() ? 0.0 : static_cast<double>(found) / idioms.size();
  s.avg_size_defined = s.total_matches > 0;
  s.avg_size = s.avg_size_defined
                   ? static_cast<double>(sizeSum) / static_cast<double>(s.total_matches)
                   : 0.0;
  return s;
}

LiftMatrix lift_matrix(const MatchReport& report, const std::vector<SourceTree>& corpus) {
  LiftMatrix m;
  m.file_count = static_cast<int>(corpus.size());
  m.idiom_count =
      report.files.empty() ? 0 : static_cast<int>(report.files.front().roots.size());

  std::map<std::string, int> pkgIndex;
  for (const auto& t : corpus)
    for (const auto& p : t.imports) pkgIndex.emplace(p, 0);
  for (auto& [name, id] : pkgIndex) {
    id = static_cast<int>(m.packages.size());
    m.packages.push_back(name);
  }

  const std::size_t np = m.packages.size();
  const std::size_t nt = m.idiom_count;
  std::vector<long> pkgFiles(np, 0), idiomFiles(nt, 0), jointFiles(nt * np, 0);
  for (std::size_t f = 0; f < corpus.size(); ++f) {
    std::vector<int> pkgs;
    {
      std::unordered_set<std::string> seen;
      for (const auto& p : corpus[f].imports)
        if (seen.insert(p).second) pkgs.push_back(pkgIndex.at(p));
    }
    for (int p : pkgs) ++pkgFiles[p];
    for (std::size_t t = 0; t < nt; ++t) {
      if (report.files[f].roots[t].empty()) continue;
      ++idiomFiles[t];
      for (int p : pkgs) ++jointFiles[t * np + p];
    }
  }

  double n = static_cast<double>(std::max(m.file_count, 1));
  m.p_package.resize(np);
  for (std::size_t p = 0; p < np; ++p) m.p_package[p] = pkgFiles[p] / n;
  m.p_idiom.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) m.p_idiom[t] = idiomFiles[t] / n;
  m.p_joint.resize(nt * np);
  m.lift.assign(nt * np, 0.0);
  m.defined.assign(nt * np, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t p = 0; p < np; ++p) {
      std::size_t i = t * np + p;
      m.p_joint[i] = jointFiles[i] / n;
      if (m.p_package[p] > 0.0 && m.p_idiom[t] > 0.0) {
        m.defined[i] = 1;
        m.lift[i] = m.p_joint[i] / (m.p_package[p] * m.p_idiom[t]);
      }
    }
  }
  return m;
}

std::vector<Suggestion> suggest(const std::vector<std::string>& imports, const LiftMatrix& m,
                                const std::vector<long>& idiom_file_counts, double sTh) {
  std::vector<int> pkgs;
  for (const auto& name : imports) {
    auto it = std::lower_bound(m.packages.begin(), m.packages.end(), name);
    if (it != m.packages.end() && *it == name)
      pkgs.push_back(static_cast<int>(it - m.packages.begin()));
  }

  std::vector<Suggestion> out;
  for (int t = 0; t < m.idiom_count; ++t) {
    double best = -1.0;
    bool any = false;
    for (int p : pkgs) {
      if (!m.is_defined(t, p)) continue;
      any = true;
      best = std::max(best, m.at(t, p));
    }
    if (any && best > sTh) out.push_back({t, best});
  }
  std::sort(out.begin(), out.end(), [&](const Suggestion& a, const Suggestion& b) {
    if (a.score != b.score) return a.score > b.score;
    long fa = a.idiom < static_cast<int>(idiom_file_counts.size()) ? idiom_file_counts[a.idiom] : 0;
    long fb = b.idiom < static_cast<int>(idiom_file_counts.size()) ? idiom_file_counts[b.idiom] : 0;
    if (fa != fb) return fa > fb;
    return a.idiom < b.idiom;
  });
  return out;
}

double recall_at_rank_k(const std::vector<std::vector<int>>& suggested_per_file,
                        const std::vector<std::vector<int>>& relevant_per_file, int k) {
  if (suggested_per_file.size() != relevant_per_file.size())
    throw usage_error("recall inputs must have one entry per file");
  if (suggested_per_file.empty()) return 0.0;
  long hits = 0;
  for (std::size_t f = 0; f < suggested_per_file.size(); ++f) {
    std::unordered_set<int> rel(relevant_per_file[f].begin(), relevant_per_file[f].end());
    const auto& sug = suggested_per_file[f];
    std::size_t top = std::min<std::size_t>(sug.size(), k < 0 ? 0 : k);
    for (std::size_t i = 0; i < top; ++i) {
      if (rel.count(sug[i])) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(suggested_per_file.size());
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

void write_lift_csv(const std::string& path, const LiftMatrix& m) {
  std::string out = "idiom";
  for (const auto& p : m.packages) {
    out += ',';
    out += csv_quote(p);
  }
  out += '\n';
  for (int t = 0; t < m.idiom_count; ++t) {
    out += std::to_string(t);
    for (std::size_t p = 0; p < m.packages.size(); ++p) {
      out += ',';
      if (m.is_defined(t, static_cast<int>(p))) out += format_double(m.at(t, static_cast<int>(p)));
    }
    out += '\n';
  }
  write_file(path, out);
}

LiftMatrix read_lift_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw schema_error(path + ": empty lift file");
  auto header = csv_split(line);
  if (header.empty() || header[0] != "idiom")
    throw schema_error(path + ": lift header must start with 'idiom'");

  LiftMatrix m;
  m.packages.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = csv_split(line);
    if (cells.size() != header.size())
      throw schema_error(path + ": lift row has " + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(header.size()));
    for (std::size_t p = 1; p < cells.size(); ++p) {
      if (cells[p].empty()) {
        m.lift.push_back(0.0);
        m.defined.push_back(0);
        continue;
      }
      double v;
      auto res = std::from_chars(cells[p].data(), cells[p].data() + cells[p].size(), v);
      if (res.ec != std::errc() || res.ptr != cells[p].data() + cells[p].size())
        throw schema_error(path + ": bad lift value '" + cells[p] + "'");
      m.lift.push_back(v);
      m.defined.push_back(1);
    }
    ++m.idiom_count;
  }
  return m;
}

}  // namespace haggis
