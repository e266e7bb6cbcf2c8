#include "defitex/dataset.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "defitex/errors.hpp"
#include "defitex/textutil.hpp"
#include "defitex/timeutil.hpp"

namespace defitex::dataset {

const char* tag_name(Tag tag) {
  switch (tag) {
    case Tag::B: return "B-MATH_TERM";
    case Tag::I: return "I-MATH_TERM";
    default: return "O";
  }
}

std::optional<Tag> tag_from_name(std::string_view name) {
  if (name == "B-MATH_TERM") return Tag::B;
  if (name == "I-MATH_TERM") return Tag::I;
  if (name == "O") return Tag::O;
  return std::nullopt;
}

namespace {

bool is_peel_cp(char32_t cp) {
  switch (cp) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '[': case ']': case '{': case '}':
    case '"':
    case 0x201C:  // “
    case 0x201D:  // ”
    case 0x2018:  // ‘
    case 0x2019:  // ’
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<Token> tokenize_text(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text::is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !text::is_space(text[j])) ++j;

    // Code point boundaries of the whitespace-delimited word.
    std::vector<std::size_t> pos;
    std::size_t p = i;
    while (p < j) {
      pos.push_back(p);
      p += text::cp_len(text, p);
    }
    pos.push_back(j);

    std::size_t lo = 0, hi = pos.size() - 1;
    while (lo < hi && is_peel_cp(text::cp_at(text, pos[lo]))) ++lo;
    while (hi > lo && is_peel_cp(text::cp_at(text, pos[hi - 1]))) --hi;

    auto push = [&](std::size_t b, std::size_t e) {
      out.push_back(Token{std::string(text.substr(b, e - b)), tex::Span{b, e}});
    };
    for (std::size_t k = 0; k < lo; ++k) push(pos[k], pos[k + 1]);
    if (lo < hi) push(pos[lo], pos[hi]);
    for (std::size_t k = hi; k + 1 < pos.size(); ++k) push(pos[k], pos[k + 1]);

    i = j;
  }
  return out;
}

std::vector<tex::Span> merge_spans(std::vector<tex::Span> spans) {
  spans.erase(std::remove_if(spans.begin(), spans.end(),
                             [](const tex::Span& s) { return s.empty(); }),
              spans.end());
  std::sort(spans.begin(), spans.end(), [](const tex::Span& a, const tex::Span& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
  });
  std::vector<tex::Span> merged;
  for (const tex::Span& s : spans) {
    if (!merged.empty() && s.begin < merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

std::vector<Tag> label_iob2(const std::vector<Token>& tokens, std::vector<tex::Span> spans,
                            std::size_t text_size, std::vector<tex::Span>* unmatched) {
  for (const tex::Span& s : spans) {
    if (s.end > text_size) {
      throw std::out_of_range("span [" + std::to_string(s.begin) + "," +
                              std::to_string(s.end) + ") beyond text length " +
                              std::to_string(text_size));
    }
  }
  const std::vector<tex::Span> merged = merge_spans(std::move(spans));
  std::vector<Tag> tags(tokens.size(), Tag::O);

  for (const tex::Span& s : merged) {
    bool any = false;
    bool first = true;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const tex::Span& r = tokens[t].range;
      if (r.end <= s.begin) continue;
      if (r.begin >= s.end) break;
      any = true;
      if (tags[t] != Tag::O) continue;  // absorbed into the previous span's chunk
      tags[t] = first ? Tag::B : Tag::I;
      first = false;
    }
    if (!any && unmatched) unmatched->push_back(s);
  }
  return tags;
}

bool iob2_valid(const std::vector<Tag>& tags) {
  Tag prev = Tag::O;
  for (const Tag t : tags) {
    if (t == Tag::I && prev == Tag::O) return false;
    prev = t;
  }
  return true;
}

std::vector<Chunk> decode_chunks(const std::vector<Token>& tokens,
                                 const std::vector<Tag>& tags) {
  std::vector<Chunk> chunks;
  for (std::size_t t = 0; t < tags.size(); ++t) {
    if (tags[t] == Tag::B) {
      chunks.push_back(Chunk{t, t, tokens[t].range});
    } else if (tags[t] == Tag::I && !chunks.empty()) {
      chunks.back().last_token = t;
      chunks.back().range.end = tokens[t].range.end;
    }
  }
  return chunks;
}

std::vector<LabeledExample> build_examples(const std::vector<DefRecord>& records,
                                           const extract::NoiseFilter& filter,
                                           const BuildOptions& options, BuildStats* stats,
                                           Diagnostics& diags) {
  std::vector<LabeledExample> out;
  BuildStats local;
  double token_sum = 0.0;

  for (const DefRecord& rec : records) {
    diags.set_paper(rec.paper_id);
    ++local.blocks;
    std::vector<Token> tokens = tokenize_text(rec.text);
    token_sum += static_cast<double>(tokens.size());
    local.max_tokens_seen = std::max(local.max_tokens_seen, tokens.size());
    if (tokens.size() > options.max_tokens) {
      ++local.dropped_over_length;
      continue;
    }

    std::vector<tex::Span> gold;
    for (const DefRecord::TermSpan& ts : rec.spans) {
      const extract::FilterDecision dec = filter.check(ts.term);
      if (!dec.keep) {
        ++local.filtered_terms;
        continue;
      }
      if (ts.start < 0 || ts.end < ts.start) {
        diags.add("term-not-located", rec.block_index, ts.term);
        continue;
      }
      gold.push_back(tex::Span{static_cast<std::size_t>(ts.start),
                               static_cast<std::size_t>(ts.end)});
    }

    std::vector<tex::Span> unmatched;
    std::vector<Tag> tags = label_iob2(tokens, gold, rec.text.size(), &unmatched);
    for (const tex::Span& s : unmatched) {
      diags.add("span-no-token", static_cast<std::int64_t>(s.begin),
                "gold span matched no token");
    }

    LabeledExample ex;
    ex.id = rec.paper_id + "#" + std::to_string(rec.block_index);
    ex.text = rec.text;
    ex.last_updated = rec.last_updated;
    for (const Chunk& c : decode_chunks(tokens, tags)) {
      ex.terms.push_back(rec.text.substr(c.range.begin, c.range.end - c.range.begin));
    }
    ex.tokens = std::move(tokens);
    ex.tags = std::move(tags);

    if (ex.terms.empty()) {
      ++local.empty_examples;
      if (options.drop_empty) continue;
    }
    local.terms += ex.terms.size();
    ++local.kept;
    out.push_back(std::move(ex));
  }
  diags.set_paper("");

  local.mean_tokens = local.blocks == 0 ? 0.0 : token_sum / static_cast<double>(local.blocks);
  if (stats) *stats = local;
  return out;
}

namespace {

// Splits "paper#3" into its ordering key parts.
std::pair<std::string, long> split_id(const std::string& id) {
  const std::size_t hash = id.rfind('#');
  if (hash == std::string::npos) return {id, 0};
  long idx = 0;
  try {
    idx = std::stol(id.substr(hash + 1));
  } catch (...) {
    idx = 0;
  }
  return {id.substr(0, hash), idx};
}

}  // namespace

void sort_chronological(std::vector<LabeledExample>& examples) {
  std::stable_sort(examples.begin(), examples.end(),
                   [](const LabeledExample& a, const LabeledExample& b) {
                     if (a.last_updated != b.last_updated) {
                       return a.last_updated < b.last_updated;
                     }
                     return split_id(a.id) < split_id(b.id);
                   });
}

std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> reserve_test(
    std::vector<LabeledExample> ordered, std::size_t n, Diagnostics& diags) {
  if (ordered.size() < n) {
    diags.add("test-underflow", -1,
              "requested " + std::to_string(n) + " test entries, have " +
                  std::to_string(ordered.size()));
    n = ordered.size();
  }
  std::vector<LabeledExample> test(std::make_move_iterator(ordered.begin()),
                                   std::make_move_iterator(ordered.begin() + n));
  std::vector<LabeledExample> rest(std::make_move_iterator(ordered.begin() + n),
                                   std::make_move_iterator(ordered.end()));
  return {std::move(test), std::move(rest)};
}

namespace {

// Reconstructed text for examples loaded from JSONL (token surfaces joined
// with single spaces).
std::string joined_text(const std::vector<Token>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i].surface;
  }
  return out;
}

}  // namespace

std::vector<LabeledExample> apply_corrections(std::vector<LabeledExample> pool,
                                              const std::vector<Correction>& corrections,
                                              Diagnostics& diags) {
  std::map<std::string, const Correction*> by_id;
  std::set<std::string> pool_ids;
  for (const LabeledExample& ex : pool) pool_ids.insert(ex.id);
  std::string unknown;
  for (const Correction& c : corrections) {
    if (!pool_ids.count(c.id)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += c.id;
    }
    by_id[c.id] = &c;
  }
  if (!unknown.empty()) {
    throw SchemaError("corrections reference unknown ids: " + unknown);
  }

  std::vector<LabeledExample> out;
  out.reserve(pool.size());
  for (LabeledExample& ex : pool) {
    const auto it = by_id.find(ex.id);
    if (it == by_id.end()) {
      out.push_back(std::move(ex));
      continue;
    }
    const Correction& c = *it->second;
    if (c.action == Correction::Action::Drop) continue;

    // Replace: locate each corrected term over the token sequence by exact
    // no-space match, leftmost first, without reusing tokens.
    std::vector<bool> used(ex.tokens.size(), false);
    std::vector<tex::Span> spans;
    for (const std::string& term : c.terms) {
      const std::string want = text::strip_spaces(term);
      if (want.empty()) continue;
      bool placed = false;
      for (std::size_t b = 0; b < ex.tokens.size() && !placed; ++b) {
        if (used[b]) continue;
        std::string acc;
        for (std::size_t e = b; e < ex.tokens.size(); ++e) {
          if (used[e]) break;
          acc += text::strip_spaces(ex.tokens[e].surface);
          if (acc.size() > want.size()) break;
          if (acc == want) {
            for (std::size_t t = b; t <= e; ++t) used[t] = true;
            spans.push_back(tex::Span{ex.tokens[b].range.begin, ex.tokens[e].range.end});
            placed = true;
            break;
          }
        }
      }
      if (!placed) {
        diags.add("correction-term-not-found", -1, ex.id + ": " + term);
      }
    }
    ex.tags = label_iob2(ex.tokens, spans, ex.text.size(), nullptr);
    ex.terms.clear();
    for (const Chunk& ch : decode_chunks(ex.tokens, ex.tags)) {
      ex.terms.push_back(ex.text.substr(ch.range.begin, ch.range.end - ch.range.begin));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic Fisher-Yates; avoids std::shuffle so outputs are identical
// across standard libraries.
void shuffle_ids(std::vector<std::string>& ids, std::uint64_t seed) {
  std::uint64_t state = splitmix64(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    state = splitmix64(state);
    const std::size_t j = static_cast<std::size_t>(state % i);
    std::swap(ids[i - 1], ids[j]);
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

std::vector<std::vector<std::string>> kfold(const std::vector<std::string>& ids, int k,
                                            std::uint64_t seed) {
  if (k < 2) throw SchemaError("k must be at least 2");
  if (static_cast<std::size_t>(k) > ids.size()) {
    throw SchemaError("k=" + std::to_string(k) + " exceeds the " +
                      std::to_string(ids.size()) + " available examples");
  }
  std::vector<std::string> shuffled = ids;
  shuffle_ids(shuffled, seed);

  const std::size_t base = shuffled.size() / static_cast<std::size_t>(k);
  const std::size_t extra = shuffled.size() % static_cast<std::size_t>(k);
  std::vector<std::vector<std::string>> folds;
  folds.reserve(k);
  std::size_t at = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    folds.emplace_back(shuffled.begin() + at, shuffled.begin() + at + size);
    at += size;
  }
  return folds;
}

std::vector<std::string> subsample(const std::vector<std::string>& ids, std::size_t n,
                                   std::uint64_t seed, Diagnostics* diags) {
  std::vector<std::string> shuffled = ids;
  shuffle_ids(shuffled, seed);
  if (n >= shuffled.size()) {
    if (n > shuffled.size() && diags) {
      diags->add("subsample-underflow", -1,
                 "requested " + std::to_string(n) + " of " + std::to_string(ids.size()));
    }
    return shuffled;
  }
  shuffled.resize(n);
  return shuffled;
}

nlohmann::ordered_json split_to_json(const SplitSpec& spec) {
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["test"] = spec.test_ids;
  j["folds"] = spec.folds;
  if (!spec.subsample_sizes.empty()) {
    j["subsample_sizes"] = spec.subsample_sizes;
    nlohmann::ordered_json subs = nlohmann::ordered_json::object();
    for (std::size_t s = 0; s < spec.subsample_sizes.size(); ++s) {
      subs[std::to_string(spec.subsample_sizes[s])] = spec.subsamples[s];
    }
    j["subsamples"] = std::move(subs);
  }
  return j;
}

void write_dataset_jsonl(std::ostream& os, const std::vector<LabeledExample>& examples) {
  for (const LabeledExample& ex : examples) {
    nlohmann::ordered_json j;
    j["id"] = ex.id;
    nlohmann::ordered_json toks = nlohmann::ordered_json::array();
    for (const Token& t : ex.tokens) toks.push_back(t.surface);
    j["tokens"] = std::move(toks);
    nlohmann::ordered_json tags = nlohmann::ordered_json::array();
    for (const Tag t : ex.tags) tags.push_back(tag_name(t));
    j["tags"] = std::move(tags);
    j["terms"] = ex.terms;
    j["last_updated"] = timeutil::format_utc(ex.last_updated);
    os << j.dump() << "\n";
  }
}

std::vector<LabeledExample> read_dataset_jsonl(std::istream& is, Diagnostics& diags) {
  std::vector<LabeledExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    LabeledExample ex;
    try {
      ex.id = j.at("id").get<std::string>();
      std::vector<std::string> surfaces = j.at("tokens").get<std::vector<std::string>>();
      std::vector<std::string> tag_names = j.at("tags").get<std::vector<std::string>>();
      ex.terms = j.at("terms").get<std::vector<std::string>>();
      if (surfaces.size() != tag_names.size()) {
        throw SchemaError("dataset line " + std::to_string(line_no) +
                          ": tokens and tags differ in length");
      }
      for (const std::string& name : tag_names) {
        const auto tag = tag_from_name(name);
        if (!tag) {
          throw SchemaError("dataset line " + std::to_string(line_no) + ": unknown tag " +
                            name);
        }
        ex.tags.push_back(*tag);
      }
      const std::string ts = j.at("last_updated").get<std::string>();
      const auto parsed = timeutil::parse_timestamp(ts);
      if (parsed) {
        ex.last_updated = *parsed;
      } else {
        ex.last_updated = 0;
        diags.add("bad-timestamp", static_cast<std::int64_t>(line_no),
                  ex.id + ": " + ts + " (epoch fallback)");
      }
      // Reconstruct token ranges over the space-joined surface text.
      std::size_t at = 0;
      for (std::size_t i = 0; i < surfaces.size(); ++i) {
        if (i) ++at;
        Token t;
        t.range = tex::Span{at, at + surfaces[i].size()};
        at += surfaces[i].size();
        t.surface = std::move(surfaces[i]);
        ex.tokens.push_back(std::move(t));
      }
      ex.text = joined_text(ex.tokens);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(ex));
  }
  return out;
}

void write_conll(std::ostream& os, const std::vector<LabeledExample>& examples) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (i) os << "\n";
    const LabeledExample& ex = examples[i];
    os << "# id = " << ex.id << "\n";
    for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
      os << ex.tokens[t].surface << "\t" << tag_name(ex.tags[t]) << "\n";
    }
  }
}

std::vector<Correction> read_corrections_jsonl(std::istream& is) {
  std::vector<Correction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      Correction c;
      c.id = j.at("id").get<std::string>();
      const std::string action = j.at("action").get<std::string>();
      if (action == "drop") {
        c.action = Correction::Action::Drop;
      } else if (action == "replace") {
        c.action = Correction::Action::Replace;
        c.terms = j.at("terms").get<std::vector<std::string>>();
      } else {
        throw SchemaError("corrections line " + std::to_string(line_no) +
                          ": unknown action " + action);
      }
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("corrections line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace defitex::dataset
