#include <set>
#include <sstream>

#include "doctest.h"

#include "defitex/dataset.hpp"
#include "defitex/errors.hpp"
#include "defitex/timeutil.hpp"
#include "testutil.hpp"

using namespace defitex;
using dataset::Tag;

namespace {

std::vector<std::string> surfaces(const std::vector<dataset::Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

dataset::LabeledExample make_example(const std::string& id, const std::string& text,
                                     const std::vector<std::string>& terms,
                                     std::int64_t updated) {
  dataset::LabeledExample ex;
  ex.id = id;
  ex.text = text;
  ex.tokens = dataset::tokenize_text(text);
  std::vector<tex::Span> spans;
  for (const auto& term : terms) {
    const std::size_t at = text.find(term);
    REQUIRE(at != std::string::npos);
    spans.push_back(tex::Span{at, at + term.size()});
  }
  ex.tags = dataset::label_iob2(ex.tokens, spans, text.size());
  for (const auto& c : dataset::decode_chunks(ex.tokens, ex.tags)) {
    ex.terms.push_back(text.substr(c.range.begin, c.range.end - c.range.begin));
  }
  ex.last_updated = updated;
  return ex;
}

}  // namespace

TEST_CASE("tokenize_text: whitespace and punctuation peeling") {
  CHECK(surfaces(dataset::tokenize_text("A spread is large.")) ==
        std::vector<std::string>{"A", "spread", "is", "large", "."});
  CHECK(surfaces(dataset::tokenize_text("non-k-equivalent")) ==
        std::vector<std::string>{"non-k-equivalent"});
  CHECK(surfaces(dataset::tokenize_text("(G, ≤)")) ==
        std::vector<std::string>{"(", "G", ",", "≤", ")"});
  CHECK(surfaces(dataset::tokenize_text("a/b stays")) ==
        std::vector<std::string>{"a/b", "stays"});
  CHECK(surfaces(dataset::tokenize_text("((x)).")) ==
        std::vector<std::string>{"(", "(", "x", ")", ")", "."});
  CHECK(dataset::tokenize_text("").empty());
  CHECK(dataset::tokenize_text("   ").empty());
}

TEST_CASE("tokenize_text: surfaces match their ranges") {
  const std::string text = "the α-critical (G, ≤) case.";
  for (const auto& t : dataset::tokenize_text(text)) {
    CHECK(t.surface == text.substr(t.range.begin, t.range.end - t.range.begin));
  }
}

TEST_CASE("label_iob2: single and multi token spans") {
  const std::string text = "A spread is";
  const auto tokens = dataset::tokenize_text(text);
  const auto tags = dataset::label_iob2(tokens, {tex::Span{2, 8}}, text.size());
  CHECK(tags == std::vector<Tag>{Tag::O, Tag::B, Tag::O});

  const std::string text2 = "graph coloring";
  const auto tags2 = dataset::label_iob2(dataset::tokenize_text(text2),
                                         {tex::Span{0, 14}}, text2.size());
  CHECK(tags2 == std::vector<Tag>{Tag::B, Tag::I});
}

TEST_CASE("label_iob2: zero spans, overlap merge, unmatched report") {
  const std::string text = "alpha beta gamma";
  const auto tokens = dataset::tokenize_text(text);
  CHECK(dataset::label_iob2(tokens, {}, text.size()) ==
        std::vector<Tag>(3, Tag::O));

  // Overlapping gold spans merge into one chunk.
  const auto tags = dataset::label_iob2(tokens, {tex::Span{0, 8}, tex::Span{6, 10}},
                                        text.size());
  CHECK(tags == std::vector<Tag>{Tag::B, Tag::I, Tag::O});

  // A span inside whitespace matches no token and is reported.
  std::vector<tex::Span> unmatched;
  dataset::label_iob2(tokens, {tex::Span{5, 6}}, text.size(), &unmatched);
  REQUIRE(unmatched.size() == 1);
  CHECK(unmatched[0] == tex::Span{5, 6});

  CHECK_THROWS_AS(dataset::label_iob2(tokens, {tex::Span{0, 999}}, text.size()),
                  std::out_of_range);
}

TEST_CASE("label_iob2: adjacent distinct spans start separate chunks") {
  const std::string text = "one two three";
  const auto tokens = dataset::tokenize_text(text);
  const auto tags =
      dataset::label_iob2(tokens, {tex::Span{0, 3}, tex::Span{4, 7}}, text.size());
  CHECK(tags == std::vector<Tag>{Tag::B, Tag::B, Tag::O});
}

TEST_CASE("iob2_valid") {
  CHECK(dataset::iob2_valid({Tag::O, Tag::B, Tag::I, Tag::O}));
  CHECK(!dataset::iob2_valid({Tag::I}));
  CHECK(!dataset::iob2_valid({Tag::O, Tag::I}));
  CHECK(dataset::iob2_valid({}));
}

TEST_CASE("build_examples: length filter is strictly greater-than") {
  dataset::DefRecord rec;
  rec.paper_id = "p";
  rec.block_index = 0;
  rec.text = "one two three four five";
  dataset::BuildOptions opts;
  opts.max_tokens = 5;
  dataset::BuildStats stats;
  Diagnostics diags;
  diags.echo = false;
  auto kept = dataset::build_examples({rec}, extract::NoiseFilter::defaults(), opts, &stats,
                                      diags);
  CHECK(kept.size() == 1);  // exactly 5 tokens: kept

  opts.max_tokens = 4;
  kept = dataset::build_examples({rec}, extract::NoiseFilter::defaults(), opts, &stats, diags);
  CHECK(kept.empty());
  CHECK(stats.dropped_over_length == 1);
}

TEST_CASE("build_examples: terms, tags and the round-trip invariant") {
  dataset::DefRecord rec;
  rec.paper_id = "p";
  rec.block_index = 2;
  rec.text = "The spread of S. Components matter. Noise i.e. here.";
  auto add = [&rec](const char* term, std::int64_t at) {
    dataset::DefRecord::TermSpan ts;
    ts.term = term;
    ts.start = at;
    ts.end = at + static_cast<std::int64_t>(std::string(term).size());
    rec.spans.push_back(ts);
  };
  add("spread", 4);
  add("Components", 17);
  add("i.e.", 42);  // filtered out
  dataset::BuildStats stats;
  Diagnostics diags;
  diags.echo = false;
  const auto kept = dataset::build_examples({rec}, extract::NoiseFilter::defaults(), {},
                                            &stats, diags);
  REQUIRE(kept.size() == 1);
  const auto& ex = kept[0];
  CHECK(ex.id == "p#2");
  CHECK(ex.terms == std::vector<std::string>{"spread", "Components"});
  CHECK(stats.filtered_terms == 1);
  CHECK(dataset::iob2_valid(ex.tags));

  // Decoding tags reproduces the terms multiset.
  std::vector<std::string> decoded;
  for (const auto& c : dataset::decode_chunks(ex.tokens, ex.tags)) {
    decoded.push_back(ex.text.substr(c.range.begin, c.range.end - c.range.begin));
  }
  CHECK(decoded == ex.terms);
}

TEST_CASE("build_examples: zero-term examples kept unless drop_empty") {
  dataset::DefRecord rec;
  rec.paper_id = "p";
  rec.text = "nothing emphasized here";
  dataset::BuildStats stats;
  Diagnostics diags;
  diags.echo = false;
  auto kept =
      dataset::build_examples({rec}, extract::NoiseFilter::defaults(), {}, &stats, diags);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].terms.empty());
  for (const Tag t : kept[0].tags) CHECK(t == Tag::O);

  dataset::BuildOptions opts;
  opts.drop_empty = true;
  kept = dataset::build_examples({rec}, extract::NoiseFilter::defaults(), opts, &stats, diags);
  CHECK(kept.empty());
}

TEST_CASE("sort_chronological: ascending with id tie-breaks") {
  const auto t1 = *timeutil::parse_timestamp("2018-06-01");
  const auto t2 = *timeutil::parse_timestamp("2019-01-01");
  std::vector<dataset::LabeledExample> xs;
  xs.push_back(make_example("b#1", "x", {}, t2));
  xs.push_back(make_example("b#0", "x", {}, t2));
  xs.push_back(make_example("a#0", "x", {}, t2));
  xs.push_back(make_example("z#0", "x", {}, t1));
  dataset::sort_chronological(xs);
  CHECK(xs[0].id == "z#0");
  CHECK(xs[1].id == "a#0");
  CHECK(xs[2].id == "b#0");
  CHECK(xs[3].id == "b#1");

  std::vector<dataset::LabeledExample> one;
  one.push_back(make_example("only#0", "x", {}, t1));
  dataset::sort_chronological(one);
  CHECK(one[0].id == "only#0");
}

TEST_CASE("reserve_test: sizes and underflow") {
  Diagnostics diags;
  diags.echo = false;
  std::vector<dataset::LabeledExample> xs;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(make_example("p#" + std::to_string(i), "x", {}, i));
  }
  auto [test1, rest1] = dataset::reserve_test(xs, 4, diags);
  CHECK(test1.size() == 4);
  CHECK(rest1.size() == 6);
  CHECK(test1[0].id == "p#0");
  CHECK(rest1[0].id == "p#4");

  auto [test2, rest2] = dataset::reserve_test(xs, 1024, diags);
  CHECK(test2.size() == 10);
  CHECK(rest2.empty());
  bool warned = false;
  for (const auto& d : diags.entries()) warned |= d.kind == "test-underflow";
  CHECK(warned);

  auto [test3, rest3] = dataset::reserve_test(xs, 0, diags);
  CHECK(test3.empty());
  CHECK(rest3.size() == 10);
}

TEST_CASE("apply_corrections: drop, replace, identity and errors") {
  Diagnostics diags;
  diags.echo = false;
  std::vector<dataset::LabeledExample> pool;
  pool.push_back(make_example("p#0", "the graph coloring problem", {"graph coloring"}, 0));
  pool.push_back(make_example("p#1", "a spread of values", {"spread"}, 0));
  pool.push_back(make_example("p#2", "untouched example", {}, 0));

  // Empty corrections: identity.
  auto same = dataset::apply_corrections(pool, {}, diags);
  REQUIRE(same.size() == 3);
  CHECK(same[0].terms == std::vector<std::string>{"graph coloring"});

  std::vector<dataset::Correction> fixes;
  fixes.push_back({"p#0", dataset::Correction::Action::Drop, {}});
  fixes.push_back({"p#1", dataset::Correction::Action::Replace, {"spread of values"}});
  const auto fixed = dataset::apply_corrections(pool, fixes, diags);
  REQUIRE(fixed.size() == 2);
  CHECK(fixed[0].id == "p#1");
  CHECK(fixed[0].terms == std::vector<std::string>{"spread of values"});
  CHECK(dataset::iob2_valid(fixed[0].tags));
  CHECK(fixed[1].id == "p#2");

  // Replace with empty terms keeps the example with all-O tags.
  std::vector<dataset::Correction> clear;
  clear.push_back({"p#1", dataset::Correction::Action::Replace, {}});
  const auto cleared = dataset::apply_corrections(pool, clear, diags);
  REQUIRE(cleared.size() == 3);
  CHECK(cleared[1].terms.empty());
  for (const Tag t : cleared[1].tags) CHECK(t == Tag::O);

  std::vector<dataset::Correction> bad;
  bad.push_back({"zzz#9", dataset::Correction::Action::Drop, {}});
  CHECK_THROWS_WITH_AS(dataset::apply_corrections(pool, bad, diags),
                       "corrections reference unknown ids: zzz#9", SchemaError);
}

TEST_CASE("kfold: near-equal sizes, determinism, errors") {
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("id" + std::to_string(i));
  auto folds = dataset::kfold(ids, 10, 42);
  REQUIRE(folds.size() == 10);
  for (const auto& f : folds) CHECK(f.size() == 2);

  ids.push_back("id20");
  folds = dataset::kfold(ids, 10, 42);
  std::size_t threes = 0, twos = 0;
  for (const auto& f : folds) {
    if (f.size() == 3) ++threes;
    if (f.size() == 2) ++twos;
  }
  CHECK(threes == 1);
  CHECK(twos == 9);

  // Disjoint and covering.
  std::set<std::string> seen;
  for (const auto& f : folds) {
    for (const auto& id : f) CHECK(seen.insert(id).second);
  }
  CHECK(seen.size() == ids.size());

  CHECK(dataset::kfold(ids, 10, 42) == folds);  // same seed, same folds
  CHECK(dataset::kfold(ids, 10, 43) != folds);
  CHECK_THROWS_AS(dataset::kfold(ids, 1, 42), SchemaError);
  CHECK_THROWS_AS(dataset::kfold({"a"}, 2, 42), SchemaError);
}

TEST_CASE("subsample: deterministic without replacement") {
  std::vector<std::string> ids;
  for (int i = 0; i < 100; ++i) ids.push_back("id" + std::to_string(i));
  const auto s1 = dataset::subsample(ids, 10, 7);
  const auto s2 = dataset::subsample(ids, 10, 7);
  CHECK(s1 == s2);
  CHECK(s1.size() == 10);
  std::set<std::string> uniq(s1.begin(), s1.end());
  CHECK(uniq.size() == 10);

  Diagnostics diags;
  diags.echo = false;
  const auto all = dataset::subsample(ids, 1000, 7, &diags);
  CHECK(all.size() == 100);
  CHECK(diags.size() == 1);
  CHECK(dataset::subsample(ids, 0, 7).empty());
}

TEST_CASE("dataset jsonl round trip and conll export") {
  std::vector<dataset::LabeledExample> xs;
  xs.push_back(make_example("p#0", "the spread of S", {"spread"},
                            *timeutil::parse_timestamp("2013-05-02T09:30:00Z")));
  std::ostringstream os;
  dataset::write_dataset_jsonl(os, xs);
  CHECK(os.str() ==
        "{\"id\":\"p#0\",\"tokens\":[\"the\",\"spread\",\"of\",\"S\"],"
        "\"tags\":[\"O\",\"B-MATH_TERM\",\"O\",\"O\"],\"terms\":[\"spread\"],"
        "\"last_updated\":\"2013-05-02T09:30:00Z\"}\n");

  std::istringstream is(os.str());
  Diagnostics diags;
  diags.echo = false;
  const auto back = dataset::read_dataset_jsonl(is, diags);
  REQUIRE(back.size() == 1);
  CHECK(back[0].id == "p#0");
  CHECK(back[0].terms == xs[0].terms);
  CHECK(back[0].tags == xs[0].tags);
  CHECK(back[0].last_updated == xs[0].last_updated);

  std::ostringstream conll;
  dataset::write_conll(conll, xs);
  CHECK(conll.str() ==
        "# id = p#0\nthe\tO\nspread\tB-MATH_TERM\nof\tO\nS\tO\n");

  std::istringstream bad("{\"id\": 3}");
  CHECK_THROWS_AS(dataset::read_dataset_jsonl(bad, diags), SchemaError);
}

TEST_CASE("property: random span placements match a brute-force oracle") {
  std::uint64_t state = 12345;
  auto next = [&state](std::uint64_t bound) {
    state = testutil::mix64(state);
    return bound == 0 ? 0 : state % bound;
  };
  static const char* words[] = {"alpha", "bb", "c", "dddd", "ee", "ffffff"};

  for (int iter = 0; iter < 2000; ++iter) {
    std::string text;
    const int nw = static_cast<int>(next(12)) + 1;
    for (int w = 0; w < nw; ++w) {
      if (w) text += next(4) == 0 ? "  " : " ";
      text += words[next(6)];
    }
    const auto tokens = dataset::tokenize_text(text);
    std::vector<tex::Span> spans;
    const int ns = static_cast<int>(next(5));
    for (int s = 0; s < ns; ++s) {
      const std::size_t a = next(text.size());
      const std::size_t b = a + 1 + next(text.size() - a);
      spans.push_back(tex::Span{a, b});
    }
    const auto tags = dataset::label_iob2(tokens, spans, text.size());
    REQUIRE(tags.size() == tokens.size());
    CHECK(dataset::iob2_valid(tags));

    // Oracle: merge by character bitmaps, then label by direct overlap.
    std::vector<std::vector<bool>> groups;
    for (const auto& s : spans) {
      std::vector<bool> bm(text.size(), false);
      for (std::size_t i = s.begin; i < s.end && i < text.size(); ++i) bm[i] = true;
      groups.push_back(std::move(bm));
    }
    bool merged_any = true;
    while (merged_any) {
      merged_any = false;
      for (std::size_t i = 0; i < groups.size() && !merged_any; ++i) {
        for (std::size_t j = i + 1; j < groups.size() && !merged_any; ++j) {
          bool overlap = false;
          for (std::size_t c = 0; c < text.size(); ++c) {
            if (groups[i][c] && groups[j][c]) overlap = true;
          }
          if (overlap) {
            for (std::size_t c = 0; c < text.size(); ++c) {
              if (groups[j][c]) groups[i][c] = true;
            }
            groups.erase(groups.begin() + static_cast<long>(j));
            merged_any = true;
          }
        }
      }
    }
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
      return std::find(a.begin(), a.end(), true) - a.begin() <
             std::find(b.begin(), b.end(), true) - b.begin();
    });
    std::vector<Tag> expect(tokens.size(), Tag::O);
    for (const auto& g : groups) {
      bool first = true;
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        bool inside = false;
        for (std::size_t c = tokens[t].range.begin; c < tokens[t].range.end; ++c) {
          if (g[c]) inside = true;
        }
        if (!inside) continue;
        if (expect[t] != Tag::O) continue;
        expect[t] = first ? Tag::B : Tag::I;
        first = false;
      }
    }
    CHECK(tags == expect);
  }
}
