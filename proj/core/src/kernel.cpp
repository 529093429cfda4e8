#include "hazsvm/kernel.hpp"

#include "hazsvm/error.hpp"

#include <cmath>
#include <string>

namespace hazsvm {

std::string_view to_string(KernelKind kind) noexcept {
  return kind == KernelKind::linear ? "linear" : "rbf";
}

KernelKind parse_kernel_kind(std::string_view text) {
  if (text == "linear") {
    return KernelKind::linear;
  }
  if (text == "rbf") {
    return KernelKind::rbf;
  }
  throw Error(ErrorKind::argument, "unknown kernel '" + std::string(text) + "' (expected linear or rbf)");
}

void KernelConfig::validate() const {
  if (kind == KernelKind::rbf && !(std::isfinite(gamma) && gamma > 0.0)) {
    throw Error(ErrorKind::argument, "rbf gamma must be finite and > 0");
  }
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::shape, "vector lengths differ: " + std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()));
  }
}

} // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

double kernel_eval(const KernelConfig& config, std::span<const double> a,
                   std::span<const double> b) {
  switch (config.kind) {
  case KernelKind::linear:
    return dot(a, b);
  case KernelKind::rbf:
    return std::exp(-config.gamma * squared_distance(a, b));
  }
  return 0.0;
}

Matrix gram_matrix(const KernelConfig& config, std::span<const FeatureVector> samples) {
  if (samples.empty()) {
    throw Error(ErrorKind::empty_input, "gram_matrix: no samples");
  }
  config.validate();
  const std::size_t n = samples.size();
  for (const auto& s : samples) {
    check_lengths(s, samples.front());
  }
  Matrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel_eval(config, samples[i], samples[j]);
      g(i, j) = k;
      g(j, i) = k;
    }
  }
  return g;
}

double default_gamma(const Dataset& data) {
  const auto d = static_cast<double>(data.feature_count());
  if (d == 0.0) {
    return 1.0;
  }
  if (data.empty()) {
    return 1.0 / d;
  }
  const auto stats = fit_normalizer(data);
  double mean_var = 0.0;
  for (double sd : stats.stddev) {
    mean_var += sd * sd;
  }
  mean_var /= d;
  return mean_var > 0.0 ? 1.0 / (d * mean_var) : 1.0 / d;
}

} // namespace hazsvm
