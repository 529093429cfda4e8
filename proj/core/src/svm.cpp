#include "hazsvm/svm.hpp"

#include "hazsvm/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace hazsvm {

void SvmHyperparams::validate() const {
  if (!(std::isfinite(c) && c > 0.0)) {
    throw Error(ErrorKind::argument, "C must be finite and > 0");
  }
  if (!(std::isfinite(tolerance) && tolerance > 0.0)) {
    throw Error(ErrorKind::argument, "tolerance must be finite and > 0");
  }
  if (max_passes < 1 || max_iterations < 1) {
    throw Error(ErrorKind::argument, "max_passes and max_iterations must be >= 1");
  }
}

FeatureVector TrainedSvm::prepare(std::span<const double> raw) const {
  if (raw.size() != raw_feature_count()) {
    throw Error(ErrorKind::shape, "model expects " + std::to_string(raw_feature_count()) +
                                      " features, got " + std::to_string(raw.size()));
  }
  return feature_mask.apply(normalization.apply(raw));
}

double TrainedSvm::working_decision_value(std::span<const double> prepared) const {
  if (prepared.size() != working_feature_count()) {
    throw Error(ErrorKind::shape, "model works on " + std::to_string(working_feature_count()) +
                                      " features, got " + std::to_string(prepared.size()));
  }
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    f += dual_coefficients[i] * kernel_eval(kernel, support_vectors[i], prepared);
  }
  return f;
}

double decision_value(const TrainedSvm& model, std::span<const double> raw) {
  return model.working_decision_value(model.prepare(raw));
}

Label predict(const TrainedSvm& model, std::span<const double> raw) {
  return decision_value(model, raw) >= 0.0 ? Label::hazard : Label::normal;
}

namespace {

constexpr double kEta = 1e-12;
constexpr double kBoundSnap = 1e-12;
constexpr std::size_t kCacheRebuildEvery = 1000;

/// Kernel rows of the training set, either from a materialized Gram matrix
/// or recomputed into two scratch rows.
class KernelRows {
public:
  KernelRows(const KernelConfig& config, const std::vector<FeatureVector>& x, bool dense)
      : config_(config), x_(x), diag_(x.size()) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      diag_[i] = kernel_eval(config, x[i], x[i]);
    }
    if (dense) {
      gram_ = gram_matrix(config, x);
    } else {
      for (auto& slot : slots_) {
        slot.values.resize(x.size());
      }
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  double at(std::size_t i, std::size_t j) const {
    return gram_.size() ? gram_(i, j) : kernel_eval(config_, x_[i], x_[j]);
  }

  std::pair<std::span<const double>, std::span<const double>> rows(std::size_t i, std::size_t j) {
    if (gram_.size()) {
      return {gram_.row(i), gram_.row(j)};
    }
    const std::size_t si = load(i, std::numeric_limits<std::size_t>::max());
    const std::size_t sj = load(j, si);
    return {slots_[si].values, slots_[sj].values};
  }

private:
  struct Slot {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    std::vector<double> values;
  };

  std::size_t load(std::size_t row, std::size_t keep) {
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      if (slots_[s].index == row) {
        return s;
      }
    }
    const std::size_t s = keep == 0 ? 1 : 0;
    for (std::size_t k = 0; k < x_.size(); ++k) {
      slots_[s].values[k] = kernel_eval(config_, x_[row], x_[k]);
    }
    slots_[s].index = row;
    return s;
  }

  KernelConfig config_;
  const std::vector<FeatureVector>& x_;
  std::vector<double> diag_;
  Matrix gram_;
  std::array<Slot, 2> slots_;
};

class SmoSolver {
public:
  SmoSolver(const Dataset& data, const KernelConfig& kernel, const SvmHyperparams& hp,
            const SmoObserver& observer)
      : data_(data), kernel_(kernel), hp_(hp), observer_(observer), n_(data.size()),
        x_(extract_features(data)), y_(extract_labels(data)),
        rows_(kernel, x_, n_ <= hp.dense_kernel_limit), alpha_(n_, 0.0), u_(n_, 0.0),
        rng_(derive_seed(hp.seed, 0x534d4fULL)) {
    refresh_bounds();
  }

  TrainedSvm solve() {
    bool examine_all = true;
    int stale_passes = 0;
    for (int sweep = 0; sweep < hp_.max_iterations; ++sweep) {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (examine_all || is_free(i)) {
          changed += examine(i);
        }
      }
      if (examine_all) {
        if (changed == 0) {
          rebuild_cache();
          if (gap() <= hp_.tolerance) {
            return snapshot();
          }
          if (++stale_passes >= hp_.max_passes) {
            fail("SMO stalled: " + std::to_string(stale_passes) +
                 " full sweeps without an admissible pair update");
          }
        } else {
          stale_passes = 0;
          examine_all = false;
        }
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    rebuild_cache();
    if (gap() <= hp_.tolerance) {
      return snapshot();
    }
    fail("SMO did not converge within " + std::to_string(hp_.max_iterations) + " sweeps");
  }

private:
  static std::vector<FeatureVector> extract_features(const Dataset& data) {
    std::vector<FeatureVector> x;
    x.reserve(data.size());
    for (const auto& s : data.samples) {
      x.push_back(s.features);
    }
    return x;
  }

  static std::vector<Label> extract_labels(const Dataset& data) {
    std::vector<Label> y;
    y.reserve(data.size());
    for (const auto& s : data.samples) {
      y.push_back(s.label);
    }
    return y;
  }

  double y(std::size_t i) const { return to_real(y_[i]); }
  bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < hp_.c; }
  bool in_up(std::size_t i) const { return y(i) > 0 ? alpha_[i] < hp_.c : alpha_[i] > 0.0; }
  bool in_low(std::size_t i) const { return y(i) > 0 ? alpha_[i] > 0.0 : alpha_[i] < hp_.c; }

  /// Bias that would put sample i exactly on its margin.
  double beta(std::size_t i) const { return y(i) - u_[i]; }

  /// Optimality holds iff max over I_up of beta <= min over I_low of beta.
  double gap() const { return up_max_ - low_min_; }

  void refresh_bounds() {
    up_max_ = -std::numeric_limits<double>::infinity();
    low_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_; ++k) {
      const double b = beta(k);
      if (in_up(k) && b > up_max_) {
        up_max_ = b;
        up_arg_ = k;
      }
      if (in_low(k) && b < low_min_) {
        low_min_ = b;
        low_arg_ = k;
      }
    }
  }

  void rebuild_cache() {
    std::fill(u_.begin(), u_.end(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (alpha_[i] == 0.0) {
        continue;
      }
      const double coef = alpha_[i] * y(i);
      for (std::size_t k = 0; k < n_; ++k) {
        u_[k] += coef * rows_.at(i, k);
      }
    }
    refresh_bounds();
  }

  double objective() const {
    double linear = 0.0, quadratic = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      linear += alpha_[i];
      quadratic += alpha_[i] * y(i) * u_[i];
    }
    return linear - 0.5 * quadratic;
  }

  std::size_t examine(std::size_t i) {
    const double b = beta(i);
    std::size_t partner;
    if (in_up(i) && b > low_min_ + hp_.tolerance) {
      partner = low_arg_;
    } else if (in_low(i) && b < up_max_ - hp_.tolerance) {
      partner = up_arg_;
    } else {
      return 0;
    }
    // Partner maximizes |E_i - E_j| among the admissible side.
    if (partner != i && take_step(i, partner)) {
      return 1;
    }
    // Seeded-random fallbacks: free samples first, then everyone.
    std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
    for (bool free_only : {true, false}) {
      const std::size_t start = pick(rng_);
      for (std::size_t step = 0; step < n_; ++step) {
        const std::size_t j = (start + step) % n_;
        if (j == i || (free_only && !is_free(j))) {
          continue;
        }
        if (take_step(i, j)) {
          return 1;
        }
      }
    }
    return 0;
  }

  double snap(double a) const {
    if (a < kBoundSnap * hp_.c) {
      return 0.0;
    }
    if (a > hp_.c * (1.0 - kBoundSnap)) {
      return hp_.c;
    }
    return a;
  }

  /// Exact maximization of the dual over (alpha_i, alpha_j) with the
  /// equality constraint held fixed.
  bool take_step(std::size_t i, std::size_t j) {
    const double yi = y(i), yj = y(j);
    const double ai = alpha_[i], aj = alpha_[j];
    const double s = yi * yj;
    const double c = hp_.c;
    const double low = yi != yj ? std::max(0.0, aj - ai) : std::max(0.0, ai + aj - c);
    const double high = yi != yj ? std::min(c, c + aj - ai) : std::min(c, ai + aj);
    if (!(low < high)) {
      return false;
    }
    const double eta = rows_.diag(i) + rows_.diag(j) - 2.0 * rows_.at(i, j);
    if (eta <= kEta) {
      return false; // duplicate points or a degenerate kernel pair
    }
    // E_i - E_j; the bias cancels.
    const double err_diff = (u_[i] - yi) - (u_[j] - yj);
    double aj_new = std::clamp(aj + yj * err_diff / eta, low, high);
    aj_new = snap(aj_new);
    if (std::abs(aj_new - aj) <= 1e-12 * (aj_new + aj + 1e-12)) {
      return false;
    }
    double ai_new = std::clamp(snap(ai + s * (aj - aj_new)), 0.0, c);

    const double di = (ai_new - ai) * yi;
    const double dj = (aj_new - aj) * yj;
    alpha_[i] = ai_new;
    alpha_[j] = aj_new;

    const auto [row_i, row_j] = rows_.rows(i, j);
    for (std::size_t k = 0; k < n_; ++k) {
      u_[k] += di * row_i[k] + dj * row_j[k];
    }
    ++updates_;
    if (updates_ % kCacheRebuildEvery == 0) {
      rebuild_cache();
    } else {
      refresh_bounds();
    }
    if (observer_) {
      observer_(SmoStep{updates_, i, j, alpha_, y_, objective()});
    }
    return true;
  }

  TrainedSvm snapshot() const {
    TrainedSvm model;
    model.kernel = kernel_;
    model.c = hp_.c;
    model.normalization = NormalizationStats::identity(data_.feature_count());
    model.feature_mask = FeatureMask::all(data_.feature_count());

    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (alpha_[i] > 0.0) {
        model.support_vectors.push_back(x_[i]);
        model.dual_coefficients.push_back(alpha_[i] * y(i));
        model.support_indices.push_back(i);
      }
      if (is_free(i)) {
        free_sum += beta(i);
        ++free_count;
      }
    }
    model.bias = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                : 0.5 * (up_max_ + low_min_);

    if (kernel_.kind == KernelKind::linear) {
      std::vector<double> w(data_.feature_count(), 0.0);
      for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
        for (std::size_t d = 0; d < w.size(); ++d) {
          w[d] += model.dual_coefficients[s] * model.support_vectors[s][d];
        }
      }
      model.weight_vector = std::move(w);
    }
    return model;
  }

  [[noreturn]] void fail(const std::string& why) {
    rebuild_cache();
    auto best = snapshot();
    const double kkt = max_kkt_violation(best, data_);
    throw ConvergenceError(why + " (best iterate: " + std::to_string(best.support_vectors.size()) +
                               " support vectors, max KKT violation " + std::to_string(kkt) + ")",
                           std::move(best), kkt);
  }

  const Dataset& data_;
  KernelConfig kernel_;
  SvmHyperparams hp_;
  const SmoObserver& observer_;
  std::size_t n_;
  std::vector<FeatureVector> x_;
  std::vector<Label> y_;
  KernelRows rows_;
  std::vector<double> alpha_;
  std::vector<double> u_; // sum_k alpha_k y_k K(k, i), no bias
  Rng rng_;
  std::size_t updates_ = 0;
  double up_max_ = 0.0;
  double low_min_ = 0.0;
  std::size_t up_arg_ = 0;
  std::size_t low_arg_ = 0;
};

} // namespace

TrainedSvm train_smo(const Dataset& data, const KernelConfig& kernel, const SvmHyperparams& hp,
                     const SmoObserver& observer) {
  hp.validate();
  kernel.validate();
  data.validate();
  if (data.size() < 2) {
    throw Error(ErrorKind::empty_input, "train_smo: need at least 2 samples");
  }
  if (data.feature_count() == 0) {
    throw Error(ErrorKind::shape, "train_smo: dataset has no features");
  }
  require_both_classes(data, "train_smo");
  return SmoSolver(data, kernel, hp, observer).solve();
}

std::vector<double> training_alphas(const TrainedSvm& model, std::size_t training_size) {
  if (model.support_indices.size() != model.dual_coefficients.size()) {
    throw Error(ErrorKind::argument, "model does not record support-vector training rows");
  }
  std::vector<double> alpha(training_size, 0.0);
  for (std::size_t s = 0; s < model.support_indices.size(); ++s) {
    const auto row = model.support_indices[s];
    if (row >= training_size) {
      throw Error(ErrorKind::shape, "support vector row " + std::to_string(row) +
                                        " is outside the training set");
    }
    alpha[row] = std::abs(model.dual_coefficients[s]);
  }
  return alpha;
}

namespace {

void check_working_shape(const TrainedSvm& model, const Dataset& data) {
  if (data.feature_count() != model.working_feature_count()) {
    throw Error(ErrorKind::shape, "dataset has " + std::to_string(data.feature_count()) +
                                      " features, model works on " +
                                      std::to_string(model.working_feature_count()));
  }
}

} // namespace

double dual_objective(const TrainedSvm& model, const Dataset& data) {
  check_working_shape(model, data);
  training_alphas(model, data.size()); // validates support rows
  double linear = 0.0, quadratic = 0.0;
  const auto& sv = model.support_vectors;
  const auto& coef = model.dual_coefficients;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    linear += std::abs(coef[i]);
    for (std::size_t j = 0; j < sv.size(); ++j) {
      quadratic += coef[i] * coef[j] * kernel_eval(model.kernel, sv[i], sv[j]);
    }
  }
  return linear - 0.5 * quadratic;
}

double max_kkt_violation(const TrainedSvm& model, const Dataset& data) {
  check_working_shape(model, data);
  const auto alpha = training_alphas(model, data.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data.samples[i];
    const double margin = to_real(s.label) * model.working_decision_value(s.features);
    double v;
    if (alpha[i] <= 0.0) {
      v = std::max(0.0, 1.0 - margin);
    } else if (alpha[i] >= model.c * (1.0 - kBoundSnap)) {
      v = std::max(0.0, margin - 1.0);
    } else {
      v = std::abs(margin - 1.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

} // namespace hazsvm
