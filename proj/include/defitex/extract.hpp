#pragma once

#include <cstdint>
#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "defitex/diagnostics.hpp"
#include "defitex/tex.hpp"

namespace defitex::extract {

struct DefinitionBlock {
  std::string paper_id;
  int block_index = 0;
  std::string raw_latex;  // environment body, comments removed
  bool has_optional = false;
  std::string optional_arg;
  tex::Span source_span;  // body range in the paper source
  std::int64_t last_updated = 0;
};

enum class SpanKind { Emph, Textit, OptionalArg };

struct LatexSpan {
  tex::Span range;  // within raw_latex; empty for OptionalArg
  SpanKind kind = SpanKind::Emph;
  std::string term_latex;  // candidate definiendum, compound rule applied
};

// One block per balanced environment occurrence, in document order.
std::vector<DefinitionBlock> extract_definition_blocks(
    const std::string& paper_id, std::int64_t last_updated, std::string_view source,
    const std::vector<std::string>& env_names, Diagnostics& diags);

// \emph{...}/\textit{...} occurrences (outermost only) plus the optional
// argument, with the compound-term extension applied: markup immediately
// adjacent to word characters or hyphens extends to the enclosing
// whitespace-delimited word, so \emph{non}-k-equivalent yields
// "non-k-equivalent".
std::vector<LatexSpan> extract_definienda_spans(const DefinitionBlock& block,
                                                Diagnostics* diags = nullptr);

struct FilterDecision {
  bool keep = true;
  std::string reason;  // set when rejected
};

// Rejects the recurrent noise classes: abbreviations ("i.e."), Latin
// locutions ("et al."), list markers ("(iii)", "1."), and terms that are
// empty, purely punctuation, purely digits, or a single character. A
// filter file (one regex per line, # comments) replaces the default lists;
// the structural rules always apply.
class NoiseFilter {
 public:
  static NoiseFilter defaults();
  static NoiseFilter from_file(const std::filesystem::path& path);

  FilterDecision check(std::string_view term) const;

 private:
  bool custom_ = false;
  std::vector<std::regex> patterns_;
};

// Convenience wrapper over NoiseFilter::defaults().
FilterDecision filter_noise(std::string_view term);

}  // namespace defitex::extract
