#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "defitex/diagnostics.hpp"
#include "defitex/extract.hpp"
#include "defitex/tex.hpp"

namespace defitex::dataset {

struct Token {
  std::string surface;
  tex::Span range;  // byte range in the rendered text
};

enum class Tag { B, I, O };

const char* tag_name(Tag tag);
std::optional<Tag> tag_from_name(std::string_view name);

struct LabeledExample {
  std::string id;  // paper_id "#" block_index
  std::vector<Token> tokens;
  std::vector<Tag> tags;
  std::vector<std::string> terms;  // gold definienda, document order
  std::int64_t last_updated = 0;
  std::string text;  // rendered text the token ranges refer to
};

// One line of the definitions JSONL produced by the extract stage.
struct DefRecord {
  std::string paper_id;
  int block_index = 0;
  std::string latex;
  bool has_optional = false;
  std::string optional_arg;
  std::string text;
  struct TermSpan {
    std::int64_t start = -1;  // -1 when the term could not be located
    std::int64_t end = -1;
    std::string term;
  };
  std::vector<TermSpan> spans;
  std::int64_t last_updated = 0;
};

// Whitespace split, then leading/trailing punctuation peeled into separate
// tokens; internal hyphens, slashes and math symbols stay in the token.
std::vector<Token> tokenize_text(std::string_view text);

// Overlapping spans merged into one.
std::vector<tex::Span> merge_spans(std::vector<tex::Span> spans);

// A token overlapping a span by at least one character is inside it; the
// first inside token of each merged span gets B, the rest I. Spans matching
// no token are reported through `unmatched`. Throws std::out_of_range for a
// span beyond the text.
std::vector<Tag> label_iob2(const std::vector<Token>& tokens, std::vector<tex::Span> spans,
                            std::size_t text_size,
                            std::vector<tex::Span>* unmatched = nullptr);

bool iob2_valid(const std::vector<Tag>& tags);

struct Chunk {
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // inclusive
  tex::Span range;             // text range from first token begin to last token end
};

std::vector<Chunk> decode_chunks(const std::vector<Token>& tokens,
                                 const std::vector<Tag>& tags);

struct BuildOptions {
  std::size_t max_tokens = 500;
  bool drop_empty = false;
};

struct BuildStats {
  std::size_t blocks = 0;
  std::size_t kept = 0;
  std::size_t dropped_over_length = 0;
  std::size_t empty_examples = 0;
  std::size_t filtered_terms = 0;
  std::size_t terms = 0;
  double mean_tokens = 0.0;  // over all blocks, before the length filter
  std::size_t max_tokens_seen = 0;
};

std::vector<LabeledExample> build_examples(const std::vector<DefRecord>& records,
                                           const extract::NoiseFilter& filter,
                                           const BuildOptions& options, BuildStats* stats,
                                           Diagnostics& diags);

// Ascending (last_updated, paper_id, block_index); stable and total.
void sort_chronological(std::vector<LabeledExample>& examples);

// First n of the ordered list become the test pool.
std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> reserve_test(
    std::vector<LabeledExample> ordered, std::size_t n, Diagnostics& diags);

struct Correction {
  std::string id;
  enum class Action { Drop, Replace } action = Action::Drop;
  std::vector<std::string> terms;
};

// Applies drop/replace corrections to the test pool, preserving order.
// Replace retags via exact (no-space) matches of each term over the token
// sequence. Unknown ids raise SchemaError listing them.
std::vector<LabeledExample> apply_corrections(std::vector<LabeledExample> pool,
                                              const std::vector<Correction>& corrections,
                                              Diagnostics& diags);

// Seeded shuffle, then k near-equal folds (sizes differ by at most one).
std::vector<std::vector<std::string>> kfold(const std::vector<std::string>& ids, int k,
                                            std::uint64_t seed);

// Deterministic sample without replacement of size min(n, |ids|).
std::vector<std::string> subsample(const std::vector<std::string>& ids, std::size_t n,
                                   std::uint64_t seed, Diagnostics* diags = nullptr);

// Stable per-(seed, fold, size) seed derivation for subsampling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

struct SplitSpec {
  std::vector<std::string> test_ids;
  std::vector<std::vector<std::string>> folds;
  std::uint64_t seed = 0;
  std::vector<std::size_t> subsample_sizes;
  // subsamples[size_index][fold_index] = sampled ids from that fold's training set
  std::vector<std::vector<std::vector<std::string>>> subsamples;
};

nlohmann::ordered_json split_to_json(const SplitSpec& spec);

// JSONL: {"id","tokens":[...],"tags":[...],"terms":[...],"last_updated":"..."}.
void write_dataset_jsonl(std::ostream& os, const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> read_dataset_jsonl(std::istream& is, Diagnostics& diags);

// CoNLL: "# id = <id>" heading, surface<TAB>tag lines, blank line between.
void write_conll(std::ostream& os, const std::vector<LabeledExample>& examples);

std::vector<Correction> read_corrections_jsonl(std::istream& is);

}  // namespace defitex::dataset
