// defitex: builds labeled definienda datasets from LaTeX paper sources and
// evaluates extraction systems against them.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "defitex/corpus.hpp"
#include "defitex/dataset.hpp"
#include "defitex/diagnostics.hpp"
#include "defitex/errors.hpp"
#include "defitex/eval.hpp"
#include "defitex/extract.hpp"
#include "defitex/pipeline.hpp"
#include "defitex/render.hpp"

namespace fs = std::filesystem;
using namespace defitex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitSchema = 4;
constexpr int kExitIdMismatch = 5;

// Optional JSON config; flags take precedence over its values.
struct Config {
  nlohmann::json data = nlohmann::json::object();

  template <typename T>
  void apply(const CLI::Option* opt, const char* key, T& value) const {
    if (opt && opt->count() > 0) return;
    if (!data.contains(key)) return;
    try {
      value = data.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("config key '") + key + "': " + e.what());
    }
  }
};

Config load_config(const std::string& path) {
  Config cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  try {
    in >> cfg.data;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("bad config JSON: ") + e.what());
  }
  if (!cfg.data.is_object()) throw SchemaError("config must be a JSON object");
  return cfg;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write output: " + path.string());
  return out;
}

void write_warnings(const Diagnostics& diags, fs::path path, const fs::path& out_path) {
  if (path.empty()) path = out_path.string() + ".warnings.jsonl";
  std::ofstream os = open_output(path);
  diags.write_jsonl(os);
}

// Falls back to <out_dir>/<name> when --out was not given.
fs::path resolve_out(const CLI::Option* opt, const std::string& out,
                     const Config& cfg, const char* name) {
  if (opt->count() > 0 || !out.empty()) return out;
  if (cfg.data.contains("out_dir")) {
    return fs::path(cfg.data.at("out_dir").get<std::string>()) / name;
  }
  throw SchemaError(std::string("--out is required (or set out_dir in the config) for ") + name);
}

std::vector<dataset::LabeledExample> load_dataset(const fs::path& path, Diagnostics& diags) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path.string());
  return dataset::read_dataset_jsonl(in, diags);
}

int cmd_scan(const std::string& root, const std::string& metadata, const fs::path& out,
             const std::string& warnings, bool quiet) {
  Diagnostics diags;
  diags.echo = !quiet;
  std::optional<fs::path> meta;
  if (!metadata.empty()) meta = metadata;
  const corpus::CorpusManifest manifest = corpus::scan_corpus(root, meta, diags);
  std::ofstream os = open_output(out);
  os << corpus::manifest_to_json(manifest).dump(2) << "\n";
  write_warnings(diags, warnings, out);
  std::cout << "scanned " << manifest.entries.size() << " papers -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_extract(const fs::path& manifest_path, const fs::path& out,
                const std::vector<std::string>& extra_envs, const std::string& symbols_path,
                const std::string& warnings, bool quiet) {
  Diagnostics diags;
  diags.echo = !quiet;
  const corpus::CorpusManifest manifest = corpus::load_manifest(manifest_path);

  pipeline::ExtractOptions options;
  for (const std::string& env : extra_envs) {
    if (std::find(options.env_names.begin(), options.env_names.end(), env) ==
        options.env_names.end()) {
      options.env_names.push_back(env);
    }
  }
  render::SymbolTable symbols;
  if (!symbols_path.empty()) {
    symbols = render::SymbolTable::with_overrides(symbols_path);
    options.symbols = &symbols;
  }

  std::vector<dataset::DefRecord> records;
  std::size_t papers_ok = 0;
  for (const corpus::PaperEntry& entry : manifest.entries) {
    try {
      const corpus::SourceText source = corpus::read_paper_source(entry, diags);
      auto recs = pipeline::extract_paper(entry, source.text, options, diags);
      records.insert(records.end(), std::make_move_iterator(recs.begin()),
                     std::make_move_iterator(recs.end()));
      ++papers_ok;
    } catch (const IoError& e) {
      diags.set_paper(entry.paper_id);
      diags.add("paper-failed", -1, e.what());
    }
  }
  std::ofstream os = open_output(out);
  pipeline::write_definitions_jsonl(os, records);
  write_warnings(diags, warnings, out);
  std::cout << "extracted " << records.size() << " definition blocks from " << papers_ok
            << " papers -> " << out.string() << "\n";
  if (records.empty()) {
    std::cerr << "no definition blocks extracted\n";
    return kExitEmpty;
  }
  return kExitOk;
}

int cmd_build(const fs::path& definitions, const fs::path& out, const std::string& conll,
              const std::string& stats_path, std::size_t max_tokens, bool drop_empty,
              const std::string& filters, const std::string& warnings, bool quiet) {
  if (max_tokens < 1) throw SchemaError("--max-tokens must be at least 1");
  Diagnostics diags;
  diags.echo = !quiet;
  std::ifstream in(definitions);
  if (!in) throw IoError("cannot open definitions: " + definitions.string());
  const std::vector<dataset::DefRecord> records = pipeline::read_definitions_jsonl(in);

  extract::NoiseFilter filter = filters.empty() ? extract::NoiseFilter::defaults()
                                                : extract::NoiseFilter::from_file(filters);
  dataset::BuildOptions options;
  options.max_tokens = max_tokens;
  options.drop_empty = drop_empty;
  dataset::BuildStats stats;
  const std::vector<dataset::LabeledExample> examples =
      dataset::build_examples(records, filter, options, &stats, diags);

  std::ofstream os = open_output(out);
  dataset::write_dataset_jsonl(os, examples);
  if (!conll.empty()) {
    std::ofstream cs = open_output(conll);
    dataset::write_conll(cs, examples);
  }
  if (!stats_path.empty()) {
    nlohmann::ordered_json js;
    js["blocks"] = stats.blocks;
    js["kept"] = stats.kept;
    js["dropped_over_length"] = stats.dropped_over_length;
    js["empty_examples"] = stats.empty_examples;
    js["filtered_terms"] = stats.filtered_terms;
    js["total_terms"] = stats.terms;
    js["mean_tokens"] = stats.mean_tokens;
    js["max_tokens"] = stats.max_tokens_seen;
    std::ofstream ss = open_output(stats_path);
    ss << js.dump(2) << "\n";
  }
  write_warnings(diags, warnings, out);
  std::cout << "built " << examples.size() << " labeled examples ("
            << stats.dropped_over_length << " dropped over " << max_tokens << " tokens) -> "
            << out.string() << "\n";
  return kExitOk;
}

int cmd_split(const fs::path& dataset_path, const fs::path& out, const fs::path& ground_truth,
              std::size_t test_size, int k, std::int64_t seed, const std::string& corrections,
              std::vector<std::size_t> subsample_sizes, bool no_subsamples,
              const std::string& warnings, bool quiet) {
  if (k < 2) throw SchemaError("--folds must be at least 2");
  Diagnostics diags;
  diags.echo = !quiet;
  std::vector<dataset::LabeledExample> examples = load_dataset(dataset_path, diags);
  dataset::sort_chronological(examples);

  auto [test_pool, remainder] = dataset::reserve_test(std::move(examples), test_size, diags);

  std::vector<dataset::LabeledExample> ground = test_pool;
  if (!corrections.empty()) {
    std::ifstream cs(corrections);
    if (!cs) throw IoError("cannot open corrections: " + corrections);
    const auto fixes = dataset::read_corrections_jsonl(cs);
    ground = dataset::apply_corrections(std::move(ground), fixes, diags);
  }
  std::ofstream gt = open_output(ground_truth);
  dataset::write_dataset_jsonl(gt, ground);

  dataset::SplitSpec spec;
  spec.seed = static_cast<std::uint64_t>(seed);
  for (const auto& ex : test_pool) spec.test_ids.push_back(ex.id);
  std::vector<std::string> remainder_ids;
  for (const auto& ex : remainder) remainder_ids.push_back(ex.id);
  spec.folds = dataset::kfold(remainder_ids, k, spec.seed);

  if (!no_subsamples) {
    std::sort(subsample_sizes.begin(), subsample_sizes.end());
    subsample_sizes.erase(std::unique(subsample_sizes.begin(), subsample_sizes.end()),
                          subsample_sizes.end());
    spec.subsample_sizes = subsample_sizes;
    for (std::size_t s = 0; s < subsample_sizes.size(); ++s) {
      std::vector<std::vector<std::string>> per_fold;
      for (std::size_t f = 0; f < spec.folds.size(); ++f) {
        std::vector<std::string> training;
        for (std::size_t g = 0; g < spec.folds.size(); ++g) {
          if (g == f) continue;
          training.insert(training.end(), spec.folds[g].begin(), spec.folds[g].end());
        }
        per_fold.push_back(dataset::subsample(
            training, subsample_sizes[s],
            dataset::derive_seed(spec.seed, f, subsample_sizes[s]), &diags));
      }
      spec.subsamples.push_back(std::move(per_fold));
    }
  }

  std::ofstream os = open_output(out);
  os << dataset::split_to_json(spec).dump(2) << "\n";
  write_warnings(diags, warnings, out);
  std::cout << "split " << spec.test_ids.size() << " test / " << remainder_ids.size()
            << " remainder into " << k << " folds -> " << out.string() << "\n";
  std::cout << "ground truth: " << ground.size() << " entries -> " << ground_truth.string()
            << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& ground_truth, const std::string& predictions,
                 const std::string& aggregate_dir, const fs::path& out,
                 const std::string& per_example, bool quiet) {
  Diagnostics diags;
  diags.echo = !quiet;

  if (!aggregate_dir.empty()) {
    if (!fs::is_directory(aggregate_dir)) {
      throw IoError("aggregate directory not found: " + aggregate_dir);
    }
    // With a ground truth the directory holds prediction files to score;
    // without one it holds previously written report JSONs.
    std::vector<eval::EvalReport> reports;
    if (!ground_truth.empty()) {
      const std::vector<dataset::LabeledExample> gt = load_dataset(ground_truth, diags);
      std::vector<fs::path> files;
      for (const auto& de : fs::directory_iterator(aggregate_dir)) {
        if (de.is_regular_file() && de.path().extension() == ".jsonl") {
          files.push_back(de.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) {
        std::ifstream in(f);
        if (!in) throw IoError("cannot open predictions: " + f.string());
        reports.push_back(eval::evaluate_run(gt, eval::read_predictions_jsonl(in)));
      }
    } else {
      std::vector<fs::path> files;
      for (const auto& de : fs::directory_iterator(aggregate_dir)) {
        if (de.is_regular_file() && de.path().extension() == ".json") {
          files.push_back(de.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) {
        std::ifstream in(f);
        if (!in) throw IoError("cannot open report: " + f.string());
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::exception& e) {
          throw SchemaError("bad report " + f.string() + ": " + e.what());
        }
        reports.push_back(eval::report_from_json(j));
      }
    }
    const eval::AggregateReport agg = eval::aggregate_folds(reports);
    std::ofstream os = open_output(out);
    os << eval::aggregate_to_json(agg).dump(2) << "\n";
    std::cout << "aggregated " << agg.n_runs << " runs -> " << out.string() << "\n";
    return kExitOk;
  }

  const std::vector<dataset::LabeledExample> gt = load_dataset(ground_truth, diags);
  std::ifstream ps(predictions);
  if (!ps) throw IoError("cannot open predictions: " + predictions);
  const std::vector<eval::PredictionRecord> preds = eval::read_predictions_jsonl(ps);

  std::vector<eval::ExampleDetail> details;
  const eval::EvalReport report =
      eval::evaluate_run(gt, preds, per_example.empty() ? nullptr : &details);
  std::ofstream os = open_output(out);
  os << eval::report_to_json(report).dump(2) << "\n";
  if (!per_example.empty()) {
    std::ofstream ds = open_output(per_example);
    eval::write_details_jsonl(ds, details);
  }
  char line[160];
  std::snprintf(line, sizeof(line),
                "P=%.4f R=%.4f F1=%.4f (tp_split %zu / extracted %zu / expected %zu)",
                report.precision, report.recall, report.f1, report.tp_split,
                report.n_extracted, report.n_expected);
  std::cout << line << " -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_oracle(const fs::path& ground_truth, const fs::path& out) {
  Diagnostics diags;
  const std::vector<dataset::LabeledExample> gt = load_dataset(ground_truth, diags);
  std::vector<eval::PredictionRecord> preds;
  preds.reserve(gt.size());
  for (const auto& ex : gt) {
    preds.push_back(eval::PredictionRecord{ex.id, eval::dedupe_expected(ex.terms)});
  }
  std::ofstream os = open_output(out);
  eval::write_predictions_jsonl(os, preds);
  std::cout << "wrote " << preds.size() << " oracle predictions -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_stats(const fs::path& dataset_path, const std::string& out) {
  Diagnostics diags;
  const std::vector<dataset::LabeledExample> examples = load_dataset(dataset_path, diags);
  std::size_t total_tokens = 0, max_tokens = 0, total_terms = 0, empty = 0;
  for (const auto& ex : examples) {
    total_tokens += ex.tokens.size();
    max_tokens = std::max(max_tokens, ex.tokens.size());
    total_terms += ex.terms.size();
    if (ex.terms.empty()) ++empty;
  }
  nlohmann::ordered_json j;
  j["examples"] = examples.size();
  j["total_tokens"] = total_tokens;
  j["mean_tokens"] =
      examples.empty() ? 0.0 : static_cast<double>(total_tokens) / examples.size();
  j["max_tokens"] = max_tokens;
  j["total_terms"] = total_terms;
  j["empty_examples"] = empty;
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os = open_output(out);
    os << j.dump(2) << "\n";
    std::cout << "stats -> " << out << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defitex: definienda dataset construction and evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  // scan
  auto* scan = app.add_subcommand("scan", "Scan a corpus tree into a manifest");
  std::string sc_root, sc_metadata, sc_out, sc_warnings;
  bool sc_quiet = false;
  auto* sc_root_opt = scan->add_option("--root", sc_root, "corpus root directory");
  auto* sc_meta_opt = scan->add_option("--metadata", sc_metadata, "TSV paper_id<TAB>timestamp");
  auto* sc_out_opt = scan->add_option("--out", sc_out, "manifest JSON path");
  scan->add_option("--warnings", sc_warnings, "warnings sidecar path");
  scan->add_flag("--quiet", sc_quiet, "suppress warning echo on stderr");

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "Extract definition blocks and spans");
  std::string ex_manifest, ex_out, ex_symbols, ex_warnings;
  std::vector<std::string> ex_envs;
  bool ex_quiet = false;
  extract_cmd->add_option("--manifest", ex_manifest, "manifest JSON")->required();
  auto* ex_out_opt = extract_cmd->add_option("--out", ex_out, "definitions JSONL path");
  extract_cmd->add_option("--env", ex_envs, "additional environment name(s) to search");
  auto* ex_sym_opt = extract_cmd->add_option("--symbols", ex_symbols, "symbol table override JSON");
  extract_cmd->add_option("--warnings", ex_warnings, "warnings sidecar path");
  extract_cmd->add_flag("--quiet", ex_quiet, "suppress warning echo on stderr");

  // build
  auto* build = app.add_subcommand("build", "Tokenize, label IOB2 and filter");
  std::string bd_defs, bd_out, bd_conll, bd_stats, bd_filters, bd_warnings;
  std::size_t bd_max_tokens = 500;
  bool bd_drop_empty = false, bd_quiet = false;
  build->add_option("--definitions", bd_defs, "definitions JSONL")->required();
  auto* bd_out_opt = build->add_option("--out", bd_out, "dataset JSONL path");
  build->add_option("--conll", bd_conll, "CoNLL export path");
  build->add_option("--stats", bd_stats, "stats JSON path");
  auto* bd_max_opt =
      build->add_option("--max-tokens", bd_max_tokens, "drop blocks over this many tokens");
  build->add_flag("--drop-empty", bd_drop_empty, "drop examples with no surviving terms");
  auto* bd_filters_opt = build->add_option("--filters", bd_filters, "noise filter pattern file");
  build->add_option("--warnings", bd_warnings, "warnings sidecar path");
  build->add_flag("--quiet", bd_quiet, "suppress warning echo on stderr");

  // split
  auto* split = app.add_subcommand("split", "Chronological test reservation and k-fold splits");
  std::string sp_dataset, sp_out, sp_gt, sp_corrections, sp_warnings;
  std::size_t sp_test_size = 1024;
  int sp_folds = 10;
  std::int64_t sp_seed = 42;
  std::vector<std::size_t> sp_subsamples;
  bool sp_no_subsamples = false, sp_quiet = false;
  split->add_option("--dataset", sp_dataset, "dataset JSONL")->required();
  auto* sp_out_opt = split->add_option("--out", sp_out, "splits JSON path");
  split->add_option("--ground-truth", sp_gt, "corrected test set JSONL path")->required();
  auto* sp_test_opt =
      split->add_option("--test-size", sp_test_size, "entries reserved for the test pool");
  auto* sp_folds_opt = split->add_option("--folds", sp_folds, "number of folds");
  auto* sp_seed_opt = split->add_option("--seed", sp_seed, "shuffle seed");
  split->add_option("--corrections", sp_corrections, "corrections JSONL");
  auto* sp_sub_opt = split->add_option("--subsample", sp_subsamples, "training subsample size(s)");
  split->add_flag("--no-subsamples", sp_no_subsamples, "skip training subsamples");
  split->add_option("--warnings", sp_warnings, "warnings sidecar path");
  split->add_flag("--quiet", sp_quiet, "suppress warning echo on stderr");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  std::string ev_gt, ev_preds, ev_aggregate, ev_out, ev_details;
  bool ev_quiet = false;
  evaluate->add_option("--ground-truth", ev_gt, "ground truth JSONL");
  evaluate->add_option("--predictions", ev_preds, "predictions JSONL");
  evaluate->add_option("--aggregate", ev_aggregate, "directory of report JSONs to aggregate");
  auto* ev_out_opt = evaluate->add_option("--out", ev_out, "report JSON path");
  evaluate->add_option("--per-example", ev_details, "per-example detail JSONL path");
  evaluate->add_flag("--quiet", ev_quiet, "suppress warning echo on stderr");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Gold-as-predictions generator");
  std::string or_gt, or_out;
  oracle->add_option("--ground-truth", or_gt, "ground truth JSONL")->required();
  auto* or_out_opt = oracle->add_option("--out", or_out, "predictions JSONL path");

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  std::string st_dataset, st_out;
  stats->add_option("--dataset", st_dataset, "dataset JSONL")->required();
  stats->add_option("--out", st_out, "stats JSON path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSchema;
  }

  try {
    const Config cfg = load_config(config_path);

    if (scan->parsed()) {
      cfg.apply(sc_root_opt, "root", sc_root);
      cfg.apply(sc_meta_opt, "metadata", sc_metadata);
      if (sc_root.empty()) throw SchemaError("--root is required");
      const fs::path out = resolve_out(sc_out_opt, sc_out, cfg, "manifest.json");
      return cmd_scan(sc_root, sc_metadata, out, sc_warnings, sc_quiet);
    }
    if (extract_cmd->parsed()) {
      cfg.apply(ex_sym_opt, "symbols", ex_symbols);
      std::vector<std::string> envs = ex_envs;
      if (ex_envs.empty() && cfg.data.contains("envs")) {
        for (const auto& e : cfg.data.at("envs")) {
          const std::string name = e.get<std::string>();
          if (name != "definition") envs.push_back(name);
        }
      }
      const fs::path out = resolve_out(ex_out_opt, ex_out, cfg, "definitions.jsonl");
      return cmd_extract(ex_manifest, out, envs, ex_symbols, ex_warnings, ex_quiet);
    }
    if (build->parsed()) {
      cfg.apply(bd_max_opt, "max_tokens", bd_max_tokens);
      cfg.apply(bd_filters_opt, "filters", bd_filters);
      const fs::path out = resolve_out(bd_out_opt, bd_out, cfg, "dataset.jsonl");
      return cmd_build(bd_defs, out, bd_conll, bd_stats, bd_max_tokens, bd_drop_empty,
                       bd_filters, bd_warnings, bd_quiet);
    }
    if (split->parsed()) {
      cfg.apply(sp_test_opt, "test_size", sp_test_size);
      cfg.apply(sp_folds_opt, "folds", sp_folds);
      cfg.apply(sp_seed_opt, "seed", sp_seed);
      if (sp_sub_opt->count() == 0) {
        if (cfg.data.contains("subsample_sizes")) {
          sp_subsamples = cfg.data.at("subsample_sizes").get<std::vector<std::size_t>>();
        } else {
          sp_subsamples = {1024, 2048, 10240};
        }
      }
      const fs::path out = resolve_out(sp_out_opt, sp_out, cfg, "splits.json");
      return cmd_split(sp_dataset, out, sp_gt, sp_test_size, sp_folds, sp_seed, sp_corrections,
                       sp_subsamples, sp_no_subsamples, sp_warnings, sp_quiet);
    }
    if (evaluate->parsed()) {
      if (ev_aggregate.empty() && (ev_gt.empty() || ev_preds.empty())) {
        throw SchemaError("evaluate needs --ground-truth and --predictions, or --aggregate");
      }
      const fs::path out = resolve_out(ev_out_opt, ev_out, cfg,
                                       ev_aggregate.empty() ? "report.json" : "aggregate.json");
      return cmd_evaluate(ev_gt, ev_preds, ev_aggregate, out, ev_details, ev_quiet);
    }
    if (oracle->parsed()) {
      const fs::path out = resolve_out(or_out_opt, or_out, cfg, "oracle.jsonl");
      return cmd_oracle(or_gt, out);
    }
    if (stats->parsed()) {
      return cmd_stats(st_dataset, st_out);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IdMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIdMismatch;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  }
  return kExitOk;
}
