#include "defitex/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "defitex/errors.hpp"
#include "defitex/textutil.hpp"

namespace defitex::eval {

namespace {

std::string canon(const std::string& term) {
  return text::to_lower(text::normalize_ws(term));
}

std::vector<std::string> dedupe(const std::vector<std::string>& terms) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const std::string& t : terms) {
    if (t.empty()) continue;
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

}  // namespace

std::vector<std::string> dedupe_expected(const std::vector<std::string>& terms) {
  std::vector<std::string> canonical;
  canonical.reserve(terms.size());
  for (const std::string& t : terms) canonical.push_back(canon(t));
  return dedupe(canonical);
}

MatchCounts count_matches(const std::vector<std::string>& expected_unique,
                          const std::vector<std::string>& extracted,
                          std::vector<TermDetail>* details) {
  std::string joined;
  for (const std::string& x : extracted) joined += text::strip_spaces(x);

  MatchCounts counts;
  for (const std::string& e : expected_unique) {
    TermDetail d;
    d.term = e;
    for (const std::string& x : extracted) {
      if (x.empty()) continue;
      if (x == e) {
        if (!d.tp) d.matches.push_back(x);
        d.tp = true;
      } else if (e.find(x) != std::string::npos) {
        d.cut_off = true;
        d.matches.push_back(x);
      } else if (x.find(e) != std::string::npos) {
        d.too_long = true;
        d.matches.push_back(x);
      }
    }
    d.tp_split = d.tp || joined.find(text::strip_spaces(e)) != std::string::npos;
    counts.tp += d.tp;
    counts.tp_split += d.tp_split;
    counts.cut_off += d.cut_off;
    counts.too_long += d.too_long;
    if (details) details->push_back(std::move(d));
  }
  return counts;
}

void compute_metrics(std::size_t tp_split, std::size_t n_extracted, std::size_t n_expected,
                     double& precision, double& recall, double& f1) {
  if (n_expected == 0) throw SchemaError("empty ground truth");
  precision = n_extracted == 0
                  ? 0.0
                  : static_cast<double>(tp_split) / static_cast<double>(n_extracted);
  recall = static_cast<double>(tp_split) / static_cast<double>(n_expected);
  f1 = (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

EvalReport evaluate_run(const std::vector<dataset::LabeledExample>& ground_truth,
                        const std::vector<PredictionRecord>& predictions,
                        std::vector<ExampleDetail>* details) {
  std::map<std::string, const PredictionRecord*> by_id;
  for (const PredictionRecord& p : predictions) {
    if (!by_id.emplace(p.example_id, &p).second) {
      throw SchemaError("duplicate prediction id: " + p.example_id);
    }
  }
  std::set<std::string> gt_ids;
  for (const auto& ex : ground_truth) gt_ids.insert(ex.id);
  std::string unknown;
  for (const PredictionRecord& p : predictions) {
    if (!gt_ids.count(p.example_id)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += p.example_id;
    }
  }
  if (!unknown.empty()) {
    throw IdMismatchError("predictions reference unknown ids: " + unknown);
  }

  EvalReport report;
  for (const auto& ex : ground_truth) {
    const std::vector<std::string> expected = dedupe_expected(ex.terms);

    std::vector<std::string> extracted;
    const auto it = by_id.find(ex.id);
    if (it != by_id.end()) {
      for (const std::string& t : it->second->terms) {
        std::string c = canon(t);
        if (!c.empty()) extracted.push_back(std::move(c));
      }
    }

    std::vector<TermDetail> term_details;
    const MatchCounts counts =
        count_matches(expected, extracted, details ? &term_details : nullptr);
    if (details) {
      details->push_back(ExampleDetail{ex.id, std::move(term_details)});
    }
    report.n_expected += expected.size();
    report.n_extracted += dedupe(extracted).size();
    report.tp += counts.tp;
    report.tp_split += counts.tp_split;
    report.cut_off += counts.cut_off;
    report.too_long += counts.too_long;
  }
  compute_metrics(report.tp_split, report.n_extracted, report.n_expected, report.precision,
                  report.recall, report.f1);
  return report;
}

namespace {

AggregateStats stats_of(const std::vector<double>& values) {
  AggregateStats s;
  const double n = static_cast<double>(values.size());
  for (const double v : values) s.mean += v;
  s.mean /= n;
  const bool identical =
      std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; });
  if (identical) {
    s.mean = values[0];  // keep identical runs exact
    return s;
  }
  if (values.size() > 1) {
    double acc = 0.0;
    for (const double v : values) acc += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(acc / (n - 1.0));
  }
  return s;
}

}  // namespace

AggregateReport aggregate_folds(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw SchemaError("cannot aggregate zero reports");
  AggregateReport agg;
  agg.n_runs = reports.size();
  auto collect = [&](auto field) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const EvalReport& r : reports) v.push_back(static_cast<double>(field(r)));
    return stats_of(v);
  };
  agg.n_expected = collect([](const EvalReport& r) { return r.n_expected; });
  agg.n_extracted = collect([](const EvalReport& r) { return r.n_extracted; });
  agg.tp = collect([](const EvalReport& r) { return r.tp; });
  agg.tp_split = collect([](const EvalReport& r) { return r.tp_split; });
  agg.too_long = collect([](const EvalReport& r) { return r.too_long; });
  agg.cut_off = collect([](const EvalReport& r) { return r.cut_off; });
  agg.precision = collect([](const EvalReport& r) { return r.precision; });
  agg.recall = collect([](const EvalReport& r) { return r.recall; });
  agg.f1 = collect([](const EvalReport& r) { return r.f1; });
  return agg;
}

namespace {

double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n_expected"] = r.n_expected;
  j["n_extracted"] = r.n_extracted;
  j["tp"] = r.tp;
  j["tp_split"] = r.tp_split;
  j["too_long"] = r.too_long;
  j["cut_off"] = r.cut_off;
  j["precision"] = round4(r.precision);
  j["recall"] = round4(r.recall);
  j["f1"] = round4(r.f1);
  j["metadata"] = {{"dedup_extracted", true}, {"category_semantics", "independent"}};
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.n_expected = j.at("n_expected").get<std::size_t>();
    r.n_extracted = j.at("n_extracted").get<std::size_t>();
    r.tp = j.at("tp").get<std::size_t>();
    r.tp_split = j.at("tp_split").get<std::size_t>();
    r.too_long = j.at("too_long").get<std::size_t>();
    r.cut_off = j.at("cut_off").get<std::size_t>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("bad report: ") + e.what());
  }
  return r;
}

nlohmann::ordered_json aggregate_to_json(const AggregateReport& r) {
  auto pair = [](const AggregateStats& s) {
    return nlohmann::ordered_json{{"mean", round4(s.mean)}, {"std", round4(s.std)}};
  };
  nlohmann::ordered_json j;
  j["n_runs"] = r.n_runs;
  j["n_expected"] = pair(r.n_expected);
  j["n_extracted"] = pair(r.n_extracted);
  j["tp"] = pair(r.tp);
  j["tp_split"] = pair(r.tp_split);
  j["too_long"] = pair(r.too_long);
  j["cut_off"] = pair(r.cut_off);
  j["precision"] = pair(r.precision);
  j["recall"] = pair(r.recall);
  j["f1"] = pair(r.f1);
  return j;
}

std::vector<PredictionRecord> read_predictions_jsonl(std::istream& is) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      PredictionRecord p;
      p.example_id = j.at("id").get<std::string>();
      p.terms = j.at("terms").get<std::vector<std::string>>();
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_predictions_jsonl(std::ostream& os, const std::vector<PredictionRecord>& preds) {
  for (const PredictionRecord& p : preds) {
    nlohmann::ordered_json j;
    j["id"] = p.example_id;
    j["terms"] = p.terms;
    os << j.dump() << "\n";
  }
}

void write_details_jsonl(std::ostream& os, const std::vector<ExampleDetail>& details) {
  for (const ExampleDetail& ex : details) {
    for (const TermDetail& t : ex.terms) {
      nlohmann::ordered_json j;
      j["id"] = ex.id;
      j["term"] = t.term;
      j["tp"] = t.tp;
      j["tp_split"] = t.tp_split;
      j["cut_off"] = t.cut_off;
      j["too_long"] = t.too_long;
      j["matches"] = t.matches;
      os << j.dump() << "\n";
    }
  }
}

}  // namespace defitex::eval
