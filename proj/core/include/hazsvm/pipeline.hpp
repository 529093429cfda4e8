#pragma once

#include "hazsvm/data.hpp"
#include "hazsvm/eval.hpp"
#include "hazsvm/kernel.hpp"
#include "hazsvm/smote.hpp"
#include "hazsvm/svm.hpp"

#include <optional>
#include <vector>

namespace hazsvm {

struct PipelineConfig {
  KernelKind kernel_kind = KernelKind::rbf;
  /// nullopt selects default_gamma() on the working training set.
  std::optional<double> gamma;
  SvmHyperparams svm;
  /// nullopt skips correlation selection.
  std::optional<double> min_abs_r = kDefaultMinAbsCorrelation;
  /// nullopt skips balancing.
  std::optional<SmoteConfig> smote = SmoteConfig{};
};

struct PipelineFit {
  TrainedSvm model;
  /// Normalized, masked, balanced rows the SVM was trained on.
  Dataset working_set;
};

/// normalize -> correlation select -> SMOTE -> SMO, all fitted on `train`.
/// The returned model carries its normalization and mask, so it scores raw
/// rows. When no column clears min_abs_r the single strongest defined
/// column is kept.
PipelineFit fit_pipeline(const Dataset& train, const PipelineConfig& config);

struct Evaluation {
  std::vector<double> scores;
  std::vector<Label> predictions;
  ConfusionMatrix confusion;
  MetricReport metrics; // auc undefined if `data` is single-class
};

Evaluation evaluate(const TrainedSvm& model, const Dataset& data);

} // namespace hazsvm
