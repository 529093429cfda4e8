#include "hazsvm/pipeline.hpp"

#include "hazsvm/error.hpp"

#include <cmath>

namespace hazsvm {

namespace {

FeatureMask choose_features(const Dataset& normalized, std::optional<double> min_abs_r) {
  if (!min_abs_r) {
    return FeatureMask::all(normalized.feature_count());
  }
  auto mask = select_features_by_correlation(normalized, *min_abs_r);
  if (!mask.kept_indices.empty()) {
    return mask;
  }
  std::optional<std::size_t> strongest;
  for (std::size_t j = 0; j < mask.correlations.size(); ++j) {
    const auto& r = mask.correlations[j];
    if (r && (!strongest || std::abs(*r) > std::abs(*mask.correlations[*strongest]))) {
      strongest = j;
    }
  }
  if (!strongest) {
    throw Error(ErrorKind::argument, "every feature has zero variance; nothing to train on");
  }
  mask.kept_indices = {*strongest};
  return mask;
}

} // namespace

PipelineFit fit_pipeline(const Dataset& train, const PipelineConfig& config) {
  train.validate();
  require_both_classes(train, "train");

  const auto stats = fit_normalizer(train);
  const auto normalized = normalize(stats, train);
  const auto mask = choose_features(normalized, config.min_abs_r);
  auto working = apply_mask(mask, normalized);
  if (config.smote) {
    working = smote_balance(working, *config.smote);
  }

  KernelConfig kernel{config.kernel_kind, 1.0};
  if (config.kernel_kind == KernelKind::rbf) {
    kernel.gamma = config.gamma ? *config.gamma : default_gamma(working);
  }

  auto attach = [&](TrainedSvm model) {
    model.normalization = stats;
    model.feature_mask = mask;
    return model;
  };
  try {
    auto model = attach(train_smo(working, kernel, config.svm));
    return {std::move(model), std::move(working)};
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.what(), attach(e.best_iterate()), e.kkt_violation());
  }
}

Evaluation evaluate(const TrainedSvm& model, const Dataset& data) {
  if (data.empty()) {
    throw Error(ErrorKind::empty_input, "evaluate: empty dataset");
  }
  Evaluation ev;
  std::vector<Label> truths;
  ev.scores.reserve(data.size());
  for (const auto& s : data.samples) {
    const double f = decision_value(model, s.features);
    ev.scores.push_back(f);
    ev.predictions.push_back(f >= 0.0 ? Label::hazard : Label::normal);
    truths.push_back(s.label);
  }
  ev.confusion = confusion(ev.predictions, truths);
  ev.metrics = classification_metrics(ev.confusion);
  if (data.count(Label::hazard) > 0 && data.count(Label::normal) > 0) {
    ev.metrics.auc = roc_auc(ev.scores, truths);
  }
  return ev;
}

} // namespace hazsvm
