#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "defitex/dataset.hpp"

namespace defitex::eval {

struct PredictionRecord {
  std::string example_id;
  std::vector<std::string> terms;  // extracted definienda, file order
};

struct EvalReport {
  std::size_t n_expected = 0;
  std::size_t n_extracted = 0;
  std::size_t tp = 0;
  std::size_t tp_split = 0;
  std::size_t too_long = 0;
  std::size_t cut_off = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct AggregateStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1); 0 for a single run
};

struct AggregateReport {
  std::size_t n_runs = 0;
  AggregateStats n_expected, n_extracted, tp, tp_split, too_long, cut_off;
  AggregateStats precision, recall, f1;
};

// Lowercase, whitespace-normalize, deduplicate preserving first occurrence.
std::vector<std::string> dedupe_expected(const std::vector<std::string>& terms);

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t tp_split = 0;
  std::size_t cut_off = 0;
  std::size_t too_long = 0;
};

struct TermDetail {
  std::string term;
  bool tp = false, tp_split = false, cut_off = false, too_long = false;
  std::vector<std::string> matches;  // extracted terms that triggered a category
};

// Four independent tests per expected term; categories may overlap. The
// split test concatenates the no-space forms of all extracted terms in
// prediction order. Both sides must already be lowercased.
MatchCounts count_matches(const std::vector<std::string>& expected_unique,
                          const std::vector<std::string>& extracted,
                          std::vector<TermDetail>* details = nullptr);

// precision = tp_split/n_extracted (0 when none extracted), recall =
// tp_split/n_expected, f1 = harmonic mean (0 when both are 0). Throws
// SchemaError for an empty ground truth.
void compute_metrics(std::size_t tp_split, std::size_t n_extracted, std::size_t n_expected,
                     double& precision, double& recall, double& f1);

struct ExampleDetail {
  std::string id;
  std::vector<TermDetail> terms;
};

// Missing predictions count as empty term lists; predictions for unknown
// ids raise IdMismatchError, duplicated ids SchemaError.
EvalReport evaluate_run(const std::vector<dataset::LabeledExample>& ground_truth,
                        const std::vector<PredictionRecord>& predictions,
                        std::vector<ExampleDetail>* details = nullptr);

AggregateReport aggregate_folds(const std::vector<EvalReport>& reports);

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
nlohmann::ordered_json aggregate_to_json(const AggregateReport& report);

std::vector<PredictionRecord> read_predictions_jsonl(std::istream& is);
void write_predictions_jsonl(std::ostream& os, const std::vector<PredictionRecord>& preds);

void write_details_jsonl(std::ostream& os, const std::vector<ExampleDetail>& details);

}  // namespace defitex::eval
