// Idiom extraction from posterior samples, ranking, symbol text parsing, and
// the JSON persistence of idiom sets and raw samples.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "haggis/demo_lang.hpp"
#include "haggis/idioms.hpp"
#include "haggis/transform.hpp"
#include "haggis/util.hpp"
#include "helpers.hpp"

using namespace haggis;
using testutil::tn;

namespace {

PosteriorSample sample_of(long iteration, std::vector<std::pair<Fragment, int>> frags) {
  PosteriorSample s;
  s.iteration = iteration;
  s.fragments = std::move(frags);
  return s;
}

Fragment frag(const TreeNode& t) { return fragment_from_tree(t); }

}  // namespace

TEST_CASE("extraction unions fragment multisets across samples") {
  testutil::ToyGrammar g;
  Fragment a = frag(tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}));
  Fragment b = frag(tn(g.E, {tn(g.T, {}), tn(g.plus, {}), tn(g.T, {})}));
  std::vector<PosteriorSample> samples = {
      sample_of(10, {{a, 0}, {b, 0}}),
      sample_of(11, {{a, 1}, {a, 1}}),
  };
  IdiomSet set = extract_idioms(samples, 1, 1, g.table);
  REQUIRE(set.idioms.size() == 2);
  CHECK(set.idioms[0].fragment == a);  // two files beat one
  CHECK(set.idioms[0].sample_count == 3);
  CHECK(set.idioms[0].file_count == 2);
  CHECK(set.idioms[1].fragment == b);
  CHECK(set.idioms[1].sample_count == 1);
  CHECK(set.idioms[1].file_count == 1);
  CHECK(set.cmin == 1);
  CHECK(set.nmin == 1);
}

TEST_CASE("count and size thresholds filter idioms") {
  testutil::ToyGrammar g;
  Fragment small = frag(tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}));  // 4 nodes
  Fragment big = frag(tn(g.E, {tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}),
                              tn(g.plus, {}), tn(g.T, {})}));  // 7 nodes
  std::vector<PosteriorSample> samples = {
      sample_of(1, {{small, 0}, {small, 1}, {big, 0}, {big, 1}, {big, 2}})};

  IdiomSet byCount = extract_idioms(samples, 3, 1, g.table);
  REQUIRE(byCount.idioms.size() == 1);
  CHECK(byCount.idioms[0].fragment == big);

  IdiomSet bySize = extract_idioms(samples, 1, 5, g.table);
  REQUIRE(bySize.idioms.size() == 1);
  CHECK(bySize.idioms[0].fragment == big);

  CHECK(extract_idioms(samples, 1, 8, g.table).idioms.empty());
  CHECK(extract_idioms(samples, 4, 1, g.table).idioms.empty());
}

TEST_CASE("raising either threshold never adds idioms") {
  testutil::ToyGrammar g;
  PriorParams params;
  params.p_stop = 0.5;
  Rng rng(28);
  std::vector<Fragment> pool;
  SymbolId roots[3] = {g.E, g.T, g.F};
  for (int i = 0; i < 6; ++i)
    pool.push_back(sample_fragment_from_prior(roots[i % 3], g.pcfg, params, rng));
  std::vector<PosteriorSample> samples;
  for (int s = 0; s < 3; ++s) {
    std::vector<std::pair<Fragment, int>> frags;
    for (int k = 0; k < 8; ++k)
      frags.emplace_back(pool[rng.below(pool.size())],
                         static_cast<int>(rng.below(4)));
    samples.push_back(sample_of(s, std::move(frags)));
  }
  std::size_t prev = extract_idioms(samples, 1, 1, g.table).idioms.size();
  CHECK(prev > 0);
  for (long cMin = 2; cMin <= 5; ++cMin) {
    std::size_t n = extract_idioms(samples, cMin, 1, g.table).idioms.size();
    CHECK(n <= prev);
    prev = n;
  }
  prev = extract_idioms(samples, 1, 1, g.table).idioms.size();
  for (long nMin = 2; nMin <= 8; ++nMin) {
    std::size_t n = extract_idioms(samples, 1, nMin, g.table).idioms.size();
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("file counts deduplicate occurrences within one file") {
  testutil::ToyGrammar g;
  Fragment a = frag(tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}));
  std::vector<PosteriorSample> samples = {sample_of(1, {{a, 3}, {a, 3}, {a, 3}})};
  IdiomSet set = extract_idioms(samples, 1, 1, g.table);
  REQUIRE(set.idioms.size() == 1);
  CHECK(set.idioms[0].sample_count == 3);
  CHECK(set.idioms[0].file_count == 1);
}

TEST_CASE("idioms rank by file count, then sample count, then content size") {
  testutil::ToyGrammar g;
  Fragment w = frag(tn(g.E, {tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}),
                             tn(g.plus, {}), tn(g.T, {})}));
  Fragment x = frag(tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}));
  Fragment y = frag(tn(g.E, {tn(g.T, {}), tn(g.plus, {}), tn(g.T, {})}));
  Fragment z = frag(tn(g.F, {tn(g.id, {})}));
  std::vector<std::pair<Fragment, int>> frags;
  auto add = [&](const Fragment& f, std::initializer_list<int> files) {
    for (int t : files) frags.emplace_back(f, t);
  };
  add(w, {0, 0});        // 2 occurrences, 1 file
  add(x, {0, 1});        // 2 occurrences, 2 files
  add(y, {0, 1, 1});     // 3 occurrences, 2 files
  add(z, {2, 2, 2, 2});  // 4 occurrences, 1 file
  IdiomSet set = extract_idioms({sample_of(1, frags)}, 1, 1, g.table);
  REQUIRE(set.idioms.size() == 4);
  CHECK(set.idioms[0].fragment == y);  // 2 files, 3 occurrences
  CHECK(set.idioms[1].fragment == x);  // 2 files, 2 occurrences
  CHECK(set.idioms[2].fragment == z);  // 1 file, 4 occurrences
  CHECK(set.idioms[3].fragment == w);  // 1 file, 2 occurrences
}

TEST_CASE("fully tied idioms fall back to code order") {
  testutil::ToyGrammar g;
  // Both have 4 nodes and identical counts; only the byte order differs.
  Fragment x = frag(tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}));
  Fragment y = frag(tn(g.E, {tn(g.T, {}), tn(g.plus, {}), tn(g.T, {})}));
  IdiomSet set = extract_idioms({sample_of(1, {{x, 0}, {y, 0}})}, 1, 1, g.table);
  REQUIRE(set.idioms.size() == 2);
  const Fragment& first = x.code < y.code ? x : y;
  const Fragment& second = x.code < y.code ? y : x;
  CHECK(set.idioms[0].fragment == first);
  CHECK(set.idioms[1].fragment == second);
}

TEST_CASE("extracting from no samples is a usage error") {
  testutil::ToyGrammar g;
  CHECK_THROWS_WITH_AS(extract_idioms({}, 1, 1, g.table),
                       doctest::Contains("no posterior samples"), Error);
}

TEST_CASE("demo-language idiom templates re-parse to the same fragment") {
  SymbolTable table;
  RawTree raw = demo::parse_source(
      "int total = a + b * 2;\n"
      "log.d(\"sum\", total);\n"
      "while (total > 0) { total = total - 1; }\n",
      "t.dl");
  TransformOptions opt;  // keep metavariables off so names survive verbatim
  opt.insert_metavars = false;
  SourceTree st = transform_tree(raw, opt, table);

  Fragment whole = fragment_from_tree(st.root);
  std::string rendered = render_template(whole, table);
  SourceTree again = transform_tree(demo::parse_source(rendered, "r.dl"), opt, table);
  CHECK(fragment_from_tree(again.root) == whole);

  // Cutting a subtree leaves a $-slot in the template.
  TreeNode cut = st.root;
  bool marked = false;
  for_each_node(cut, [&](TreeNode& n) {
    if (!marked && &n != &cut && !n.is_leaf()) {
      n.z = true;
      marked = true;
    }
  });
  REQUIRE(marked);
  std::string partial = render_template(fragment_at(cut), table);
  CHECK(partial.find('$') != std::string::npos);
  CHECK_NOTHROW(demo::parse_template(partial));
}

TEST_CASE("symbol texts round trip through the parser") {
  SymbolTable table;
  std::vector<SymbolId> ids;
  ids.push_back(table.intern_node("Call", {{"name", "query"}, {"recv", "db"}}));
  ids.push_back(table.intern_node("Weird", {{"a", "x,y"},
                                            {"b", "p=q"},
                                            {"c", "br]k["},
                                            {"d", "back\\slash"}}));
  ids.push_back(table.intern_node("Lit", {}));
  ids.push_back(table.group_symbol("Call", "args"));
  ids.push_back(table.dummy_symbol("Block", "stmts"));
  ids.push_back(table.metavar_symbol("int"));
  ids.push_back(table.metavar_symbol("?"));

  for (SymbolId id : ids) {
    const std::string& text = table.info(id).text;
    SymbolTable fresh;
    SymbolId back = parse_symbol_text(fresh, text);
    CHECK(fresh.info(back).text == text);
    // Parsing into the owning table finds the existing entry.
    CHECK(parse_symbol_text(table, text) == id);
  }

  SymbolTable fresh;
  CHECK_THROWS_WITH_AS(parse_symbol_text(fresh, ""), doctest::Contains("empty symbol text"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_symbol_text(fresh, "K]"), doctest::Contains("bad symbol text"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_symbol_text(fresh, "K[a"), doctest::Contains("bad symbol text"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_symbol_text(fresh, "K[abc]"), doctest::Contains("bad symbol text"),
                       Error);
}

TEST_CASE("idiom set JSON round trips and is canonical") {
  testutil::ToyGrammar g;
  Fragment a = frag(tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}));
  Fragment b = frag(tn(g.E, {tn(g.T, {}), tn(g.plus, {}), tn(g.T, {})}));
  IdiomSet set = extract_idioms({sample_of(1, {{a, 0}, {a, 1}, {b, 2}})}, 1, 1, g.table);
  set.alpha = 2.5;
  set.pstop = 0.6;
  set.seed = 42;
  set.provenance = "deadbeefdeadbeef";

  testutil::TempDir dir;
  std::string path = dir.file("idioms.json");
  save_idiom_set(path, set, g.table);

  SymbolTable fresh;
  IdiomSet back = load_idiom_set(path, fresh);
  CHECK(back.alpha == set.alpha);
  CHECK(back.pstop == set.pstop);
  CHECK(back.cmin == set.cmin);
  CHECK(back.nmin == set.nmin);
  CHECK(back.seed == set.seed);
  CHECK(back.provenance == set.provenance);
  REQUIRE(back.idioms.size() == set.idioms.size());
  for (std::size_t i = 0; i < set.idioms.size(); ++i) {
    CHECK(back.idioms[i].sample_count == set.idioms[i].sample_count);
    CHECK(back.idioms[i].file_count == set.idioms[i].file_count);
    CHECK(render_template(back.idioms[i].fragment, fresh) ==
          render_template(set.idioms[i].fragment, g.table));
  }

  // Saving from the freshly loaded table reproduces the file byte for byte.
  std::string path2 = dir.file("again.json");
  save_idiom_set(path2, back, fresh);
  CHECK(read_file(path2) == read_file(path));

  CHECK_THROWS_WITH_AS(load_idiom_set(dir.file("absent.json"), fresh), doctest::Contains(""),
                       Error);
  write_file(dir.file("bad.json"), "not json");
  CHECK_THROWS_WITH_AS(load_idiom_set(dir.file("bad.json"), fresh),
                       doctest::Contains("invalid idiom set JSON"), Error);
  write_file(dir.file("v2.json"), "{\"version\": 2}");
  CHECK_THROWS_WITH_AS(load_idiom_set(dir.file("v2.json"), fresh),
                       doctest::Contains("unsupported idiom set version"), Error);
}

TEST_CASE("posterior samples round trip through JSON") {
  testutil::ToyGrammar g;
  Fragment a = frag(tn(g.T, {tn(g.F, {}), tn(g.star, {}), tn(g.F, {})}));
  Fragment b = frag(tn(g.F, {tn(g.id, {})}));
  std::vector<PosteriorSample> samples = {
      sample_of(76, {{a, 0}, {b, 2}}),
      sample_of(77, {{b, 1}}),
  };
  testutil::TempDir dir;
  std::string path = dir.file("samples.json");
  save_samples(path, samples, g.table);

  std::vector<PosteriorSample> back = load_samples(path, g.table);
  REQUIRE(back.size() == 2);
  CHECK(back[0].iteration == 76);
  CHECK(back[1].iteration == 77);
  CHECK(back[0].fragments == samples[0].fragments);
  CHECK(back[1].fragments == samples[1].fragments);

  // Loading into a fresh table preserves the rendered shapes.
  SymbolTable fresh;
  std::vector<PosteriorSample> remapped = load_samples(path, fresh);
  REQUIRE(remapped[0].fragments.size() == 2);
  CHECK(render_template(remapped[0].fragments[0].first, fresh) ==
        render_template(a, g.table));

  std::string text = read_file(path);
  auto corrupt = [&](const std::string& from, const std::string& to,
                     const std::string& message) {
    std::string body = text;
    std::size_t pos = body.find(from);
    REQUIRE(pos != std::string::npos);
    body.replace(pos, from.size(), to);
    std::string p = dir.file("corrupt.json");
    write_file(p, body);
    SymbolTable t2;
    CHECK_THROWS_WITH_AS(load_samples(p, t2), doctest::Contains(message.c_str()), Error);
  };
  corrupt("\"code\":[", "\"code\":[999999,", "even-length");
  corrupt("\"code\":[", "\"code\":[999999,0,", "symbol id out of range");
  corrupt("\"version\":1", "\"version\":3", "unsupported samples version");

  SymbolTable t3;
  write_file(dir.file("junk.json"), "[]");
  CHECK_THROWS_WITH_AS(load_samples(dir.file("junk.json"), t3),
                       doctest::Contains("invalid samples JSON"), Error);
}
