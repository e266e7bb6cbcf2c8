#include "defitex/extract.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "defitex/errors.hpp"
#include "defitex/textutil.hpp"

namespace defitex::extract {

std::vector<DefinitionBlock> extract_definition_blocks(
    const std::string& paper_id, std::int64_t last_updated, std::string_view source,
    const std::vector<std::string>& env_names, Diagnostics& diags) {
  const std::vector<tex::Token> tokens = tex::tokenize(source);

  std::vector<tex::EnvBlock> blocks;
  std::vector<tex::EnvDiagnostic> env_diags;
  for (const std::string& name : env_names) {
    auto found = tex::find_environments(tokens, name, &env_diags);
    blocks.insert(blocks.end(), std::make_move_iterator(found.begin()),
                  std::make_move_iterator(found.end()));
  }
  std::sort(blocks.begin(), blocks.end(), [](const tex::EnvBlock& a, const tex::EnvBlock& b) {
    return a.body_span.begin < b.body_span.begin;
  });
  for (const tex::EnvDiagnostic& d : env_diags) {
    diags.add(d.kind, static_cast<std::int64_t>(d.offset), "environment " + d.name);
  }

  std::vector<DefinitionBlock> out;
  out.reserve(blocks.size());
  int index = 0;
  for (tex::EnvBlock& b : blocks) {
    std::string raw = tex::strip_comments(b.body);
    if (raw.empty()) {
      diags.add("empty-definition", static_cast<std::int64_t>(b.body_span.begin),
                "environment " + b.name);
      continue;
    }
    DefinitionBlock blk;
    blk.paper_id = paper_id;
    blk.block_index = index++;
    blk.raw_latex = std::move(raw);
    blk.has_optional = b.has_optional;
    blk.optional_arg = b.optional_arg;
    blk.source_span = b.body_span;
    blk.last_updated = last_updated;
    out.push_back(std::move(blk));
  }
  return out;
}

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80 || c == '-' || c == '_';
}

bool all_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return text::is_space(c); });
}

}  // namespace

std::vector<LatexSpan> extract_definienda_spans(const DefinitionBlock& block,
                                                Diagnostics* diags) {
  const std::string& raw = block.raw_latex;
  const std::vector<tex::Token> tokens = tex::tokenize(raw);
  std::vector<LatexSpan> spans;

  if (block.has_optional) {
    LatexSpan s;
    s.kind = SpanKind::OptionalArg;
    s.term_latex = block.optional_arg;
    spans.push_back(std::move(s));
  }

  bool in_math = false;
  std::size_t last_span_end = 0;  // keeps extensions of adjacent markup disjoint
  std::size_t idx = 0;
  while (idx < tokens.size()) {
    const tex::Token& t = tokens[idx];
    if (t.kind == tex::TokKind::MathShift) {
      in_math = !in_math;
      ++idx;
      continue;
    }
    if (t.kind != tex::TokKind::Command || (t.name != "emph" && t.name != "textit")) {
      ++idx;
      continue;
    }

    // Locate the braced argument (whitespace between command and brace ok).
    std::size_t k = idx + 1;
    while (k < tokens.size() && tokens[k].kind == tex::TokKind::Text &&
           all_whitespace(tokens[k].lexeme)) {
      ++k;
    }
    if (k >= tokens.size() || tokens[k].kind != tex::TokKind::GroupOpen) {
      if (diags) {
        diags->add("emph-missing-arg", static_cast<std::int64_t>(t.span.begin),
                   "\\" + t.name + " without braced argument");
      }
      ++idx;
      continue;
    }
    int depth = 1;
    std::size_t m = k + 1;
    while (m < tokens.size() && depth > 0) {
      if (tokens[m].kind == tex::TokKind::GroupOpen) ++depth;
      else if (tokens[m].kind == tex::TokKind::GroupClose) --depth;
      ++m;
    }
    if (depth > 0) {
      if (diags) {
        diags->add("unbalanced-braces", static_cast<std::int64_t>(t.span.begin),
                   "\\" + t.name + " argument never closed");
      }
      idx = m;
      continue;
    }
    const tex::Token& close = tokens[m - 1];
    const tex::Span content{tokens[k].span.end, close.span.begin};

    // Compound extension to the enclosing whitespace-delimited word.
    std::size_t left = t.span.begin;
    std::size_t ext_left = left;
    while (ext_left > 0 && is_word_byte(static_cast<unsigned char>(raw[ext_left - 1]))) {
      --ext_left;
    }
    ext_left = std::max(ext_left, std::min(last_span_end, left));
    std::size_t right = close.span.end;
    std::size_t ext_right = right;
    while (ext_right < raw.size() && is_word_byte(static_cast<unsigned char>(raw[ext_right]))) {
      ++ext_right;
    }

    LatexSpan s;
    s.kind = t.name == "emph" ? SpanKind::Emph : SpanKind::Textit;
    s.term_latex = raw.substr(ext_left, left - ext_left) +
                   raw.substr(content.begin, content.end - content.begin) +
                   raw.substr(right, ext_right - right);
    s.range.begin = ext_left < left ? ext_left : content.begin;
    s.range.end = ext_right > right ? ext_right : content.end;
    if (in_math && diags) {
      diags->add("emph-in-math", static_cast<std::int64_t>(t.span.begin),
                 "emphasis inside math mode");
    }
    last_span_end = s.range.end;
    spans.push_back(std::move(s));
    idx = m;  // outermost only: skip anything nested inside the argument
  }
  return spans;
}

namespace {

bool is_trim_punct(char32_t cp) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    return !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'));
  }
  switch (cp) {
    case 0x2013:  // –
    case 0x2014:  // —
    case 0x2018:  // ‘
    case 0x2019:  // ’
    case 0x201C:  // “
    case 0x201D:  // ”
    case 0x2026:  // …
    case 0x00AB:  // «
    case 0x00BB:  // »
    case 0x00B7:  // ·
      return true;
    default:
      return false;
  }
}

std::string trim_punct(std::string_view s) {
  // Collect code point boundaries, then trim punctuation from both ends.
  std::vector<std::size_t> pos;
  std::size_t i = 0;
  while (i < s.size()) {
    pos.push_back(i);
    i += text::cp_len(s, i);
  }
  pos.push_back(s.size());
  std::size_t lo = 0, hi = pos.size() - 1;
  while (lo < hi && is_trim_punct(text::cp_at(s, pos[lo]))) ++lo;
  while (hi > lo && is_trim_punct(text::cp_at(s, pos[hi - 1]))) --hi;
  return std::string(s.substr(pos[lo], pos[hi] - pos[lo]));
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_roman_numeral(const std::string& s) {
  static const std::regex re("^m{0,3}(cm|cd|d?c{0,3})(xc|xl|l?x{0,3})(ix|iv|v?i{0,3})$");
  return !s.empty() && std::regex_match(s, re);
}

const std::set<std::string>& abbreviations() {
  static const std::set<std::string> set = {"i.e", "e.g", "cf", "resp", "etc"};
  return set;
}

const std::set<std::string>& latin_locutions() {
  static const std::set<std::string> set = {"et al", "a priori", "ad hoc", "per se",
                                            "vice versa"};
  return set;
}

}  // namespace

NoiseFilter NoiseFilter::defaults() { return NoiseFilter(); }

NoiseFilter NoiseFilter::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open filter file: " + path.string());
  NoiseFilter f;
  f.custom_ = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = text::normalize_ws(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    try {
      f.patterns_.emplace_back(trimmed, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw SchemaError("filter file " + path.string() + " line " + std::to_string(line_no) +
                        ": " + e.what());
    }
  }
  return f;
}

FilterDecision NoiseFilter::check(std::string_view term) const {
  const std::string lower = text::to_lower(text::normalize_ws(term));
  const std::string core = trim_punct(lower);
  if (core.empty()) return {false, "empty-or-punctuation"};
  if (all_digits(core)) return {false, "numeric"};

  std::string base = core;
  while (!base.empty() && base.back() == '.') base.pop_back();

  if (custom_) {
    for (const std::regex& re : patterns_) {
      if (std::regex_match(core, re) || std::regex_match(lower, re)) {
        return {false, "custom-pattern"};
      }
    }
  } else {
    if (abbreviations().count(base)) return {false, "abbreviation"};
    if (latin_locutions().count(base)) return {false, "latin-locution"};
    if (is_roman_numeral(base)) return {false, "list-entry"};
  }
  if (text::cp_count(core) == 1) return {false, "single-character"};
  return {true, ""};
}

FilterDecision filter_noise(std::string_view term) {
  static const NoiseFilter filter = NoiseFilter::defaults();
  return filter.check(term);
}

}  // namespace defitex::extract
