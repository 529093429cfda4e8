#pragma once

#include "hazsvm/data.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hazsvm {

enum class KernelKind { linear, rbf };

std::string_view to_string(KernelKind kind) noexcept;
KernelKind parse_kernel_kind(std::string_view text);

struct KernelConfig {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0; // only read for rbf

  static KernelConfig linear() { return {KernelKind::linear, 1.0}; }
  static KernelConfig rbf(double gamma) { return {KernelKind::rbf, gamma}; }

  /// Throws argument error for a non-finite or non-positive rbf gamma.
  void validate() const;

  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

/// Square, row-major, dense.
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

/// rbf: exp(-gamma * |a - b|^2), in (0, 1]. linear: a . b.
double kernel_eval(const KernelConfig& config, std::span<const double> a,
                   std::span<const double> b);

/// G(i, j) = K(x_i, x_j). Each off-diagonal value is computed once and
/// stored in both triangles, so the result is symmetric bit-for-bit.
Matrix gram_matrix(const KernelConfig& config, std::span<const FeatureVector> samples);

/// 1 / (d * mean per-feature population variance); 1/d when that variance
/// is zero.
double default_gamma(const Dataset& data);

} // namespace hazsvm
