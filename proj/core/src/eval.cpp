#include "hazsvm/eval.hpp"

#include "hazsvm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hazsvm {

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) {
    throw Error(ErrorKind::shape, "confusion: " + std::to_string(predictions.size()) +
                                      " predictions vs " + std::to_string(truths.size()) + " truths");
  }
  if (predictions.empty()) {
    throw Error(ErrorKind::empty_input, "confusion: no samples");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool predicted = predictions[i] == Label::hazard;
    const bool actual = truths[i] == Label::hazard;
    if (predicted && actual) {
      ++cm.tp;
    } else if (predicted) {
      ++cm.fp;
    } else if (actual) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

namespace {

Metric ratio(std::size_t num, std::size_t den) {
  if (den == 0) {
    return std::nullopt;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

MetricReport classification_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) {
    throw Error(ErrorKind::empty_input, "classification_metrics: empty confusion matrix");
  }
  MetricReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0) {
    // 2PR/(P+R) == 2tp/(2tp+fp+fn); the count form is exact.
    r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  }
  return r;
}

namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts check_scored(std::span<const double> scores, std::span<const Label> truths) {
  if (scores.size() != truths.size()) {
    throw Error(ErrorKind::shape, "ROC: " + std::to_string(scores.size()) + " scores vs " +
                                      std::to_string(truths.size()) + " truths");
  }
  ClassCounts counts;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw Error(ErrorKind::argument, "ROC: non-finite score at " + std::to_string(i));
    }
    (truths[i] == Label::hazard ? counts.positives : counts.negatives) += 1;
  }
  if (counts.positives == 0 || counts.negatives == 0) {
    throw Error(ErrorKind::degenerate_labels, "ROC: degenerate labels (both classes required)");
  }
  return counts;
}

std::vector<std::size_t> order_by_score_desc(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

} // namespace

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const Label> truths) {
  const auto counts = check_scored(scores, truths);
  const auto order = order_by_score_desc(scores);
  const auto p = static_cast<double>(counts.positives);
  const auto n = static_cast<double>(counts.negatives);

  std::vector<RocPoint> points{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      (truths[order[k]] == Label::hazard ? tp : fp) += 1;
      ++k;
    }
    points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
  }
  return points;
}

double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  }
  return area;
}

double roc_auc(std::span<const double> scores, std::span<const Label> truths) {
  const auto counts = check_scored(scores, truths);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based mid-ranks of the positives, doubled to stay integral.
  std::size_t twice_rank_sum = 0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) {
      ++end;
    }
    const std::size_t twice_mid_rank = (k + 1) + end; // ranks k+1 .. end
    for (std::size_t m = k; m < end; ++m) {
      if (truths[order[m]] == Label::hazard) {
        twice_rank_sum += twice_mid_rank;
      }
    }
    k = end;
  }
  const auto p = static_cast<double>(counts.positives);
  const auto n = static_cast<double>(counts.negatives);
  const double u = 0.5 * static_cast<double>(twice_rank_sum) - p * (p + 1.0) / 2.0;
  return u / (p * n);
}

} // namespace hazsvm
