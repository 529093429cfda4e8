#include "hazsvm_cli/commands.hpp"

#include "hazsvm_cli/model_io.hpp"

#include "hazsvm/csv.hpp"
#include "hazsvm/data.hpp"
#include "hazsvm/error.hpp"
#include "hazsvm/pipeline.hpp"
#include "hazsvm/tuning.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace hazsvm::cli {

namespace {

enum class Format { text, kv };

/// Ordered key/value report: "key: value" for people, "key=value" for scripts.
class Report {
public:
  void add(std::string key, std::string value) { lines_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) { add(std::move(key), csv::format_double(value)); }
  void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, const Metric& value, Format format) {
    add(std::move(key), value ? csv::format_double(*value) : (format == Format::kv ? "NA" : "undefined"));
  }

  void write(std::ostream& out, Format format) const {
    std::size_t width = 0;
    for (const auto& [k, v] : lines_) {
      width = std::max(width, k.size());
    }
    for (const auto& [k, v] : lines_) {
      if (format == Format::kv) {
        out << k << '=' << v << '\n';
      } else {
        out << std::left << std::setw(static_cast<int>(width + 1)) << (k + ":") << ' ' << v << '\n';
      }
    }
  }

private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, path + ": cannot open for reading");
  }
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::io, path + ": cannot open for writing");
  }
  return out;
}

void check_columns(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                   const std::string& source) {
  const std::size_t n = std::max(expected.size(), actual.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= actual.size()) {
      throw Error(ErrorKind::feature_mismatch,
                  source + ": missing column '" + expected[i] + "' expected by the model");
    }
    if (i >= expected.size()) {
      throw Error(ErrorKind::feature_mismatch,
                  source + ": unexpected column '" + actual[i] + "' not known to the model");
    }
    if (expected[i] != actual[i]) {
      throw Error(ErrorKind::feature_mismatch, source + ": column '" + actual[i] +
                                                   "' does not match model feature '" +
                                                   expected[i] + "'");
    }
  }
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string observations;
  std::string reports;
  std::string output;
  double window_secs = 3600.0;
  double radius_km = 50.0;
};

void cmd_ingest(const IngestArgs& a, Format format, std::ostream& out) {
  auto obs = open_in(a.observations);
  auto reports = open_in(a.reports);
  JoinOptions options{a.window_secs, a.radius_km, a.observations, a.reports};
  const auto data = label_from_reports(obs, reports, options);
  auto file = open_out(a.output);
  write_labeled_csv(file, data);

  Report r;
  r.add("rows", data.size());
  r.add("hazard", data.count(Label::hazard));
  r.add("normal", data.count(Label::normal));
  r.add("output", a.output);
  r.write(out, format);
}

struct PipelineArgs {
  std::string kernel = "rbf";
  std::optional<double> gamma;
  bool no_smote = false;
  int k_neighbors = 5;
  double smote_ratio = 1.0;
  double min_abs_r = kDefaultMinAbsCorrelation;
  bool no_feature_selection = false;
  std::uint64_t seed = 0;
  double tolerance = 1e-3;
  int max_iterations = 10'000;
};

void add_pipeline_flags(CLI::App* cmd, PipelineArgs& a) {
  cmd->add_option("--kernel", a.kernel, "Kernel: rbf or linear")->capture_default_str();
  cmd->add_flag("--no-smote", a.no_smote, "Skip SMOTE balancing");
  cmd->add_option("--k-neighbors", a.k_neighbors, "SMOTE neighbors")->capture_default_str();
  cmd->add_option("--smote-ratio", a.smote_ratio, "SMOTE minority/majority target")->capture_default_str();
  cmd->add_option("--min-abs-r", a.min_abs_r, "Keep features with |Pearson r| >= this")
      ->capture_default_str();
  cmd->add_flag("--no-feature-selection", a.no_feature_selection, "Keep every feature");
  cmd->add_option("--seed", a.seed, "PRNG seed")->capture_default_str();
  cmd->add_option("--tolerance", a.tolerance, "KKT tolerance")->capture_default_str();
  cmd->add_option("--max-iterations", a.max_iterations, "SMO sweep budget")->capture_default_str();
}

std::optional<SmoteConfig> smote_of(const PipelineArgs& a) {
  if (a.no_smote) {
    return std::nullopt;
  }
  return SmoteConfig{a.k_neighbors, a.smote_ratio, a.seed};
}

std::optional<double> min_abs_r_of(const PipelineArgs& a) {
  if (a.no_feature_selection) {
    return std::nullopt;
  }
  return a.min_abs_r;
}

SvmHyperparams svm_of(const PipelineArgs& a, double c) {
  SvmHyperparams hp;
  hp.c = c;
  hp.tolerance = a.tolerance;
  hp.max_iterations = a.max_iterations;
  hp.seed = a.seed;
  return hp;
}

struct TrainArgs {
  std::string data;
  std::string model;
  double c = 1.0;
  PipelineArgs pipeline;
};

void cmd_train(const TrainArgs& a, Format format, std::ostream& out) {
  const auto data = load_labeled_csv_file(a.data);
  PipelineConfig config;
  config.kernel_kind = parse_kernel_kind(a.pipeline.kernel);
  config.gamma = a.pipeline.gamma;
  config.svm = svm_of(a.pipeline, a.c);
  config.min_abs_r = min_abs_r_of(a.pipeline);
  config.smote = smote_of(a.pipeline);

  const auto fit = fit_pipeline(data, config);
  const double kkt = max_kkt_violation(fit.model, fit.working_set);

  ModelFile file;
  file.model = fit.model;
  file.feature_names = data.feature_names;
  file.training = {data.size(),           data.count(Label::hazard), data.count(Label::normal),
                   fit.working_set.size(), a.pipeline.seed,          utc_timestamp_now()};
  save_model_file(a.model, file);

  Report r;
  r.add("support_vectors", fit.model.support_vectors.size());
  r.add("kkt_violation", kkt);
  r.add("kernel", std::string(to_string(fit.model.kernel.kind)));
  if (fit.model.kernel.kind == KernelKind::rbf) {
    r.add("gamma", fit.model.kernel.gamma);
  }
  r.add("c", fit.model.c);
  r.add("features_kept", fit.model.working_feature_count());
  r.add("training_rows", fit.working_set.size());
  r.add("model", a.model);
  r.write(out, format);
}

std::vector<double> parse_grid(const std::string& text, const char* name) {
  std::vector<double> grid;
  for (const auto& cell : csv::split(text, ',')) {
    auto v = csv::parse_double(cell);
    if (!v) {
      throw Error(ErrorKind::argument, std::string(name) + " grid: not a number: '" + cell + "'");
    }
    grid.push_back(*v);
  }
  return grid;
}

std::string join_grid(const std::vector<double>& grid) {
  std::string s;
  for (double v : grid) {
    s += (s.empty() ? "" : ",") + csv::format_double(v);
  }
  return s;
}

struct TuneArgs {
  std::string data;
  std::string output;
  std::string c_grid = join_grid(default_c_grid());
  std::string gamma_grid = join_grid(default_gamma_grid());
  int k = 5;
  std::string metric = "f1";
  unsigned threads = 0;
  PipelineArgs pipeline;
};

void cmd_tune(const TuneArgs& a, Format format, std::ostream& out) {
  const auto data = load_labeled_csv_file(a.data);
  const auto c_grid = parse_grid(a.c_grid, "C");
  const auto gamma_grid = parse_grid(a.gamma_grid, "gamma");

  GridSearchOptions options;
  options.cv = {a.k, a.pipeline.seed, smote_of(a.pipeline), min_abs_r_of(a.pipeline)};
  options.svm = svm_of(a.pipeline, 1.0);
  options.kernel_kind = parse_kernel_kind(a.pipeline.kernel);
  options.selection_metric = parse_selection_metric(a.metric);
  options.threads = a.threads;

  const auto result = grid_search(data, c_grid, gamma_grid, options);
  auto file = open_out(a.output);
  write_grid_csv(file, result);

  const auto& best = result.table[result.best_index];
  Report r;
  r.add("best_c", best.c);
  r.add("best_gamma", best.gamma);
  r.add("mean_" + std::string(to_string(result.selection_metric)),
        best.cv ? best.cv->summary(result.selection_metric).mean : std::nullopt, format);
  r.add("failed_folds", best.failed_folds);
  r.add("configurations", result.table.size());
  r.add("report", a.output);
  r.write(out, format);
}

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::string report;
};

void cmd_evaluate(const EvaluateArgs& a, Format format, std::ostream& out) {
  const auto file = load_model_file(a.model);
  const auto data = load_labeled_csv_file(a.data);
  check_columns(file.feature_names, data.feature_names, a.data);
  const auto ev = evaluate(file.model, data);

  Report r;
  r.add("samples", data.size());
  r.add("accuracy", ev.metrics.accuracy, format);
  r.add("precision", ev.metrics.precision, format);
  r.add("recall", ev.metrics.recall, format);
  r.add("f1", ev.metrics.f1, format);
  r.add("auc", ev.metrics.auc, format);
  r.add("tp", ev.confusion.tp);
  r.add("fp", ev.confusion.fp);
  r.add("fn", ev.confusion.fn);
  r.add("tn", ev.confusion.tn);
  r.write(out, format);
  if (!a.report.empty()) {
    auto report = open_out(a.report);
    Report kv;
    kv.add("samples", data.size());
    kv.add("accuracy", ev.metrics.accuracy, Format::kv);
    kv.add("precision", ev.metrics.precision, Format::kv);
    kv.add("recall", ev.metrics.recall, Format::kv);
    kv.add("f1", ev.metrics.f1, Format::kv);
    kv.add("auc", ev.metrics.auc, Format::kv);
    kv.add("tp", ev.confusion.tp);
    kv.add("fp", ev.confusion.fp);
    kv.add("fn", ev.confusion.fn);
    kv.add("tn", ev.confusion.tn);
    kv.write(report, Format::kv);
  }
}

struct PredictArgs {
  std::string model;
  std::string input;
  std::string output;
};

void cmd_predict(const PredictArgs& a, Format format, std::ostream& out) {
  const auto file = load_model_file(a.model);
  auto in = open_in(a.input);
  csv::Reader reader(in, a.input);
  auto header = reader.next();
  if (!header) {
    throw Error(ErrorKind::empty_input, a.input + ": empty file (a header row is required)");
  }
  check_columns(file.feature_names, header->cells, a.input);

  auto dst = open_out(a.output);
  for (const auto& name : header->cells) {
    dst << name << ',';
  }
  dst << "decision_value,label\n";

  std::size_t rows = 0, hazard = 0;
  FeatureVector x(header->cells.size());
  while (auto row = reader.next()) {
    if (row->cells.size() != header->cells.size()) {
      throw Error(ErrorKind::parse, a.input + ":" + std::to_string(row->line) + ": expected " +
                                        std::to_string(header->cells.size()) + " columns, got " +
                                        std::to_string(row->cells.size()));
    }
    for (std::size_t c = 0; c < x.size(); ++c) {
      auto v = csv::parse_double(row->cells[c]);
      if (!v) {
        throw Error(ErrorKind::parse, a.input + ":" + std::to_string(row->line) + ": column '" +
                                          header->cells[c] + "': not a number: '" + row->cells[c] + "'");
      }
      x[c] = *v;
    }
    const double f = decision_value(file.model, x);
    const bool is_hazard = f >= 0.0;
    for (const auto& cell : row->cells) {
      dst << cell << ',';
    }
    dst << csv::format_double(f) << ',' << (is_hazard ? "1" : "-1") << '\n';
    ++rows;
    hazard += is_hazard ? 1 : 0;
  }

  Report r;
  r.add("rows", rows);
  r.add("hazard", hazard);
  r.add("normal", rows - hazard);
  r.add("output", a.output);
  r.write(out, format);
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hazardous-weather SVM: ingest, train, tune, evaluate, predict", "hazsvm"};
  app.require_subcommand(1);

  std::string format_name = "text";
  app.add_option("--format", format_name, "Report format: text or kv")
      ->check(CLI::IsMember({"text", "kv"}))
      ->capture_default_str();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Label observations against storm reports");
  ingest_cmd->add_option("--observations", ingest.observations, "Observation CSV")->required();
  ingest_cmd->add_option("--reports", ingest.reports, "Storm report CSV")->required();
  ingest_cmd->add_option("--output", ingest.output, "Labeled CSV to write")->required();
  ingest_cmd->add_option("--window-secs", ingest.window_secs, "Time window")->capture_default_str();
  ingest_cmd->add_option("--radius-km", ingest.radius_km, "Search radius")->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit the pipeline and write a model");
  train_cmd->add_option("--data", train.data, "Labeled CSV")->required();
  train_cmd->add_option("--model", train.model, "Model JSON to write")->required();
  train_cmd->add_option("--c", train.c, "Soft-margin penalty")->capture_default_str();
  train_cmd->add_option("--gamma", train.pipeline.gamma, "RBF width (default: 1/(d * mean variance))");
  add_pipeline_flags(train_cmd, train.pipeline);

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Grid search over C and gamma with stratified CV");
  tune_cmd->add_option("--data", tune.data, "Labeled CSV")->required();
  tune_cmd->add_option("--output", tune.output, "Grid report CSV to write")->required();
  tune_cmd->add_option("--c-grid", tune.c_grid, "Comma-separated C values")->capture_default_str();
  tune_cmd->add_option("--gamma-grid", tune.gamma_grid, "Comma-separated gamma values")
      ->capture_default_str();
  tune_cmd->add_option("--k", tune.k, "Folds")->capture_default_str();
  tune_cmd->add_option("--metric", tune.metric, "Selection metric")
      ->check(CLI::IsMember({"accuracy", "precision", "recall", "f1", "auc"}))
      ->capture_default_str();
  tune_cmd->add_option("--threads", tune.threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_pipeline_flags(tune_cmd, tune.pipeline);

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a labeled CSV");
  evaluate_cmd->add_option("--model", evaluate_args.model, "Model JSON")->required();
  evaluate_cmd->add_option("--data", evaluate_args.data, "Labeled CSV")->required();
  evaluate_cmd->add_option("--report", evaluate_args.report, "Also write key=value metrics here");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Append decision values and labels to a CSV");
  predict_cmd->add_option("--model", predict_args.model, "Model JSON")->required();
  predict_cmd->add_option("--input", predict_args.input, "Unlabeled CSV")->required();
  predict_cmd->add_option("--output", predict_args.output, "CSV to write")->required();

  // CLI11 consumes a reversed argument vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  const Format format = format_name == "kv" ? Format::kv : Format::text;
  try {
    if (*ingest_cmd) {
      cmd_ingest(ingest, format, out);
    } else if (*train_cmd) {
      cmd_train(train, format, out);
    } else if (*tune_cmd) {
      cmd_tune(tune, format, out);
    } else if (*evaluate_cmd) {
      cmd_evaluate(evaluate_args, format, out);
    } else if (*predict_cmd) {
      cmd_predict(predict_args, format, out);
    }
  } catch (const Error& e) {
    err << "error: " << error_tag(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

} // namespace hazsvm::cli
