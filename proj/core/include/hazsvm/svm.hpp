#pragma once

#include "hazsvm/data.hpp"
#include "hazsvm/error.hpp"
#include "hazsvm/kernel.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace hazsvm {

struct SvmHyperparams {
  double c = 1.0;
  double tolerance = 1e-3;
  /// Consecutive full sweeps that find violators but cannot move any pair
  /// before training gives up.
  int max_passes = 10;
  /// Budget of outer sweeps.
  int max_iterations = 10'000;
  std::uint64_t seed = 0;
  /// Training sets up to this size get a materialized Gram matrix; larger
  /// ones recompute kernel rows on demand.
  std::size_t dense_kernel_limit = 20'000;

  void validate() const;
};

/// A trained soft-margin classifier
///
///     f(x) = sum_i dual_coefficients[i] * K(support_vectors[i], prepare(x)) + bias
///
/// where prepare() z-scores the raw row and keeps the masked columns. The
/// support vectors live in that prepared ("working") space. For models fit
/// directly by train_smo the normalization is the identity and the mask
/// keeps every column; the pipeline attaches the real ones.
struct TrainedSvm {
  KernelConfig kernel;
  double c = 1.0;
  std::vector<FeatureVector> support_vectors;
  std::vector<double> dual_coefficients; // alpha_i * y_i
  /// Row of each support vector in the working-space training set.
  std::vector<std::size_t> support_indices;
  double bias = 0.0;
  NormalizationStats normalization;
  FeatureMask feature_mask;
  /// sum_i alpha_i y_i x_i, linear kernel only.
  std::optional<std::vector<double>> weight_vector;

  std::size_t raw_feature_count() const noexcept { return normalization.feature_count(); }
  std::size_t working_feature_count() const noexcept { return feature_mask.kept_indices.size(); }

  FeatureVector prepare(std::span<const double> raw) const;
  /// f on an already prepared row.
  double working_decision_value(std::span<const double> prepared) const;
};

/// Snapshot passed to a training observer after every accepted pair update.
struct SmoStep {
  std::size_t update = 0; // 1-based count of accepted updates
  std::size_t first = 0;
  std::size_t second = 0;
  std::span<const double> alpha; // full alpha vector, training order
  std::span<const Label> labels;
  double objective = 0.0;
};

using SmoObserver = std::function<void(const SmoStep&)>;

/// Raised when the sweep budget runs out or training stalls. Carries the
/// last iterate, which has the highest dual objective seen so far.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& message, TrainedSvm best, double kkt_violation)
      : Error(ErrorKind::convergence, message), best_(std::move(best)), kkt_(kkt_violation) {}

  const TrainedSvm& best_iterate() const noexcept { return best_; }
  double kkt_violation() const noexcept { return kkt_; }

private:
  TrainedSvm best_;
  double kkt_;
};

/// Solves  max sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
///         s.t. 0 <= a_i <= C, sum_i a_i y_i = 0
/// by sequential minimal optimization. On return every sample satisfies the
/// KKT conditions to within hp.tolerance.
TrainedSvm train_smo(const Dataset& data, const KernelConfig& kernel, const SvmHyperparams& hp,
                     const SmoObserver& observer = {});

double decision_value(const TrainedSvm& model, std::span<const double> raw);
/// +1 when decision_value >= 0.
Label predict(const TrainedSvm& model, std::span<const double> raw);

/// Alpha per row of the working-space training set (zero off the support).
std::vector<double> training_alphas(const TrainedSvm& model, std::size_t training_size);

/// Dual objective at the model's alphas. `data` is the working-space
/// training set the model was fit on.
double dual_objective(const TrainedSvm& model, const Dataset& data);

/// Largest KKT violation over the working-space training set:
///   alpha = 0      -> max(0, 1 - y f(x))
///   0 < alpha < C  -> |y f(x) - 1|
///   alpha = C      -> max(0, y f(x) - 1)
double max_kkt_violation(const TrainedSvm& model, const Dataset& data);

} // namespace hazsvm
