#pragma once

#include "hazsvm/data.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hazsvm {

/// Positive class is Label::hazard.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// nullopt marks a metric that is undefined (0/0), never a silent 0 or NaN.
using Metric = std::optional<double>;

struct MetricReport {
  Metric accuracy;
  Metric precision;
  Metric recall;
  Metric f1;
  Metric auc;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truths);

/// Accuracy, precision, recall and F1; auc is left undefined.
MetricReport classification_metrics(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Sweeps every distinct score (descending) as a threshold, predicting
/// hazard when score >= threshold, preceded by a threshold above the
/// maximum. Runs from (0, 0) to (1, 1).
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const Label> truths);

/// Trapezoidal area under a ROC polyline.
double trapezoid_area(std::span<const RocPoint> points);

/// Mann-Whitney U / (P * N) with ties counted one half, computed from
/// mid-ranks in O(n log n).
double roc_auc(std::span<const double> scores, std::span<const Label> truths);

} // namespace hazsvm
