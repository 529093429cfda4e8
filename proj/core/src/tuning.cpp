#include "hazsvm/tuning.hpp"

#include "hazsvm/csv.hpp"
#include "hazsvm/error.hpp"
#include "hazsvm/pipeline.hpp"
#include "hazsvm/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

namespace hazsvm {

std::string_view to_string(SelectionMetric metric) noexcept {
  switch (metric) {
  case SelectionMetric::accuracy: return "accuracy";
  case SelectionMetric::precision: return "precision";
  case SelectionMetric::recall: return "recall";
  case SelectionMetric::f1: return "f1";
  case SelectionMetric::auc: return "auc";
  }
  return "f1";
}

SelectionMetric parse_selection_metric(std::string_view text) {
  for (auto m : {SelectionMetric::accuracy, SelectionMetric::precision, SelectionMetric::recall,
                 SelectionMetric::f1, SelectionMetric::auc}) {
    if (text == to_string(m)) {
      return m;
    }
  }
  throw Error(ErrorKind::argument, "unknown selection metric '" + std::string(text) + "'");
}

const MetricSummary& CvResult::summary(SelectionMetric metric) const {
  switch (metric) {
  case SelectionMetric::accuracy: return accuracy;
  case SelectionMetric::precision: return precision;
  case SelectionMetric::recall: return recall;
  case SelectionMetric::f1: return f1;
  case SelectionMetric::auc: return auc;
  }
  return f1;
}

std::uint64_t fold_fingerprint(std::span<const std::size_t> validation) {
  std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
  for (auto i : validation) {
    auto v = static_cast<std::uint64_t>(i);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

MetricSummary summarize(const std::vector<MetricReport>& folds, Metric MetricReport::*field) {
  std::vector<double> values;
  for (const auto& f : folds) {
    if (const auto& v = f.*field) {
      values.push_back(*v);
    }
  }
  MetricSummary s;
  s.defined = values.size();
  if (values.empty()) {
    return s;
  }
  double mean = 0.0;
  for (double v : values) {
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) {
    var += (v - mean) * (v - mean);
  }
  s.mean = mean;
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

} // namespace

CvResult cross_validate(const Dataset& data, const KernelConfig& kernel, const SvmHyperparams& hp,
                        const CvOptions& options) {
  kernel.validate();
  hp.validate();
  const auto folds = stratified_kfold_indices(data, options.k, options.seed);

  CvResult result;
  std::vector<char> in_fold(data.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& validation_rows = folds[f];
    result.fold_fingerprints.push_back(fold_fingerprint(validation_rows));

    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (auto i : validation_rows) {
      in_fold[i] = 1;
    }
    std::vector<std::size_t> train_rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!in_fold[i]) {
        train_rows.push_back(i);
      }
    }

    const std::uint64_t fold_seed = derive_seed(options.seed, f + 1);
    PipelineConfig config;
    config.kernel_kind = kernel.kind;
    config.gamma = kernel.gamma;
    config.svm = hp;
    config.svm.seed = derive_seed(fold_seed, 2);
    config.min_abs_r = options.min_abs_r;
    config.smote = options.smote;
    if (config.smote) {
      config.smote->seed = derive_seed(fold_seed, 1);
    }

    try {
      const auto fit = fit_pipeline(subset(data, train_rows), config);
      result.folds.push_back(evaluate(fit.model, subset(data, validation_rows)).metrics);
    } catch (const ConvergenceError&) {
      ++result.failed_folds;
    }
  }

  if (result.folds.empty()) {
    throw Error(ErrorKind::tuning, "cross-validation: all " + std::to_string(folds.size()) +
                                       " folds failed to converge");
  }
  result.accuracy = summarize(result.folds, &MetricReport::accuracy);
  result.precision = summarize(result.folds, &MetricReport::precision);
  result.recall = summarize(result.folds, &MetricReport::recall);
  result.f1 = summarize(result.folds, &MetricReport::f1);
  result.auc = summarize(result.folds, &MetricReport::auc);
  return result;
}

namespace {

int rank_class(const GridCell& cell, SelectionMetric metric) {
  if (!cell.cv) {
    return 0;
  }
  const bool defined = cell.cv->summary(metric).mean.has_value();
  if (cell.failed_folds == 0) {
    return defined ? 3 : 2;
  }
  return defined ? 1 : 0;
}

bool better(const GridCell& a, const GridCell& b, SelectionMetric metric) {
  const int ra = rank_class(a, metric), rb = rank_class(b, metric);
  if (ra != rb) {
    return ra > rb;
  }
  if (ra == 3 || ra == 1) {
    const double ma = *a.cv->summary(metric).mean;
    const double mb = *b.cv->summary(metric).mean;
    if (ma != mb) {
      return ma > mb;
    }
  }
  if (a.c != b.c) {
    return a.c < b.c;
  }
  return a.gamma < b.gamma;
}

void check_grid(std::span<const double> grid, const char* name) {
  if (grid.empty()) {
    throw Error(ErrorKind::argument, std::string(name) + " grid is empty");
  }
  for (double v : grid) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw Error(ErrorKind::argument, std::string(name) + " grid values must be finite and > 0");
    }
  }
}

} // namespace

GridSearchResult grid_search(const Dataset& data, std::span<const double> c_grid,
                             std::span<const double> gamma_grid, const GridSearchOptions& options) {
  check_grid(c_grid, "C");
  check_grid(gamma_grid, "gamma");

  GridSearchResult result;
  result.selection_metric = options.selection_metric;
  for (double c : c_grid) {
    for (double g : gamma_grid) {
      result.table.push_back({c, g, std::nullopt, 0});
    }
  }

  const std::size_t cells = result.table.size();
  std::vector<std::exception_ptr> errors(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells; idx = next++) {
      auto& cell = result.table[idx];
      SvmHyperparams hp = options.svm;
      hp.c = cell.c;
      try {
        cell.cv = cross_validate(data, KernelConfig{options.kernel_kind, cell.gamma}, hp, options.cv);
        cell.failed_folds = cell.cv->failed_folds;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::tuning) {
          cell.failed_folds = static_cast<std::size_t>(options.cv.k);
        } else {
          errors[idx] = std::current_exception();
        }
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(cells));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }

  if (std::none_of(result.table.begin(), result.table.end(), [](const auto& c) { return c.cv.has_value(); })) {
    throw Error(ErrorKind::tuning, "grid search: every configuration failed");
  }
  for (std::size_t i = 1; i < cells; ++i) {
    if (better(result.table[i], result.table[result.best_index], options.selection_metric)) {
      result.best_index = i;
    }
  }
  result.best_c = result.table[result.best_index].c;
  result.best_gamma = result.table[result.best_index].gamma;
  return result;
}

namespace {

std::string cell_text(const Metric& m) {
  return m ? csv::format_double(*m) : "NA";
}

} // namespace

void write_grid_csv(std::ostream& out, const GridSearchResult& result) {
  out << "c,gamma,mean_f1,std_f1,mean_accuracy,mean_auc,failed_folds\n";
  for (const auto& cell : result.table) {
    const MetricSummary none;
    const auto& f1 = cell.cv ? cell.cv->f1 : none;
    const auto& acc = cell.cv ? cell.cv->accuracy : none;
    const auto& auc = cell.cv ? cell.cv->auc : none;
    out << csv::format_double(cell.c) << ',' << csv::format_double(cell.gamma) << ','
        << cell_text(f1.mean) << ',' << cell_text(f1.stddev) << ',' << cell_text(acc.mean) << ','
        << cell_text(auc.mean) << ',' << cell.failed_folds << '\n';
  }
}

} // namespace hazsvm
