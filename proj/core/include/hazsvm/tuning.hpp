#pragma once

#include "hazsvm/data.hpp"
#include "hazsvm/eval.hpp"
#include "hazsvm/kernel.hpp"
#include "hazsvm/smote.hpp"
#include "hazsvm/svm.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hazsvm {

enum class SelectionMetric { accuracy, precision, recall, f1, auc };

std::string_view to_string(SelectionMetric metric) noexcept;
SelectionMetric parse_selection_metric(std::string_view text);

/// Mean and population stddev over the folds where the metric is defined.
struct MetricSummary {
  Metric mean;
  Metric stddev;
  std::size_t defined = 0;

  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct CvResult {
  std::vector<MetricReport> folds; // successful folds, fold order
  /// Hash of each fold's validation row set, all k folds.
  std::vector<std::uint64_t> fold_fingerprints;
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
  MetricSummary auc;
  std::size_t failed_folds = 0;

  const MetricSummary& summary(SelectionMetric metric) const;

  friend bool operator==(const CvResult&, const CvResult&) = default;
};

struct CvOptions {
  int k = 5;
  std::uint64_t seed = 0;
  std::optional<SmoteConfig> smote = SmoteConfig{};
  std::optional<double> min_abs_r = kDefaultMinAbsCorrelation;
};

/// Fingerprint of a validation index set, order-sensitive.
std::uint64_t fold_fingerprint(std::span<const std::size_t> validation);

/// Stratified k-fold CV of the full pipeline. Everything data-dependent
/// (normalizer, mask, SMOTE) is fit on each fold's training part only; the
/// validation part is only transformed and scored. Folds whose training
/// does not converge are counted in failed_folds and left out of the means.
/// Per-fold PRNG streams derive from (seed, fold index).
CvResult cross_validate(const Dataset& data, const KernelConfig& kernel, const SvmHyperparams& hp,
                        const CvOptions& options);

struct GridCell {
  double c = 0.0;
  double gamma = 0.0;
  /// nullopt when every fold failed.
  std::optional<CvResult> cv;
  std::size_t failed_folds = 0;
};

struct GridSearchResult {
  std::vector<GridCell> table; // c-major, in grid order
  double best_c = 0.0;
  double best_gamma = 0.0;
  std::size_t best_index = 0;
  SelectionMetric selection_metric = SelectionMetric::f1;
};

struct GridSearchOptions {
  CvOptions cv;
  /// c and seed are overwritten per cell.
  SvmHyperparams svm;
  KernelKind kernel_kind = KernelKind::rbf;
  SelectionMetric selection_metric = SelectionMetric::f1;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
};

inline const std::vector<double>& default_c_grid() {
  static const std::vector<double> grid{0.1, 1.0, 10.0, 100.0};
  return grid;
}

inline const std::vector<double>& default_gamma_grid() {
  static const std::vector<double> grid{0.01, 0.1, 1.0, 10.0};
  return grid;
}

/// Exhaustive search over C x gamma (gamma is ignored by the linear
/// kernel but still enumerated). Every cell is cross-validated on the same folds.
/// Ranking: cells with no failed folds first, then higher mean selection
/// metric (undefined below defined), then smaller C, then smaller gamma.
/// The result does not depend on the thread count.
GridSearchResult grid_search(const Dataset& data, std::span<const double> c_grid,
                             std::span<const double> gamma_grid, const GridSearchOptions& options);

/// Columns: c, gamma, mean_f1, std_f1, mean_accuracy, mean_auc,
/// failed_folds. Undefined values are written as NA.
void write_grid_csv(std::ostream& out, const GridSearchResult& result);

} // namespace hazsvm
