#pragma once

// Independent solvers for the soft-margin SVM dual
//   max  sum(a) - 1/2 a' Q a,  Q_ij = y_i y_j K_ij
//   s.t. 0 <= a_i <= C, y' a = 0
// used only to check the SMO trainer on tiny problems. They share nothing
// with the library except the kernel matrix they are handed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace hazsvm::testing {

using DenseMatrix = std::vector<std::vector<double>>;

inline double dual_value(const DenseMatrix& k, const std::vector<double>& y,
                         const std::vector<double>& a) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < a.size(); ++j) {
      quad += a[i] * a[j] * y[i] * y[j] * k[i][j];
    }
  }
  return lin - 0.5 * quad;
}

/// Euclidean projection onto {0 <= a <= C, y'a = 0} by bisection on the
/// multiplier of the equality constraint.
inline std::vector<double> project(const std::vector<double>& z, const std::vector<double>& y,
                                   double c) {
  auto at = [&](double nu) {
    std::vector<double> a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      a[i] = std::clamp(z[i] - nu * y[i], 0.0, c);
    }
    return a;
  };
  auto residual = [&](double nu) {
    const auto a = at(nu);
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      r += y[i] * a[i];
    }
    return r; // non-increasing in nu
  };
  double lo = -1.0, hi = 1.0;
  while (residual(lo) < 0.0) lo *= 2.0;
  while (residual(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return at(0.5 * (lo + hi));
}

/// Accelerated projected gradient ascent, run until the iterate moves less
/// than 1e-13 or the budget is spent.
inline double projected_gradient_max(const DenseMatrix& k, const std::vector<double>& y, double c,
                                     int max_iterations = 200'000) {
  const std::size_t n = y.size();
  double lipschitz = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += std::abs(k[i][j]);
    }
    lipschitz = std::max(lipschitz, row);
  }
  const double step = 1.0 / lipschitz;

  std::vector<double> a(n, 0.0), prev = a, v = a;
  double t = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      double g = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        g -= y[i] * y[j] * k[i][j] * v[j];
      }
      z[i] = v[i] + step * g;
    }
    prev = a;
    a = project(z, y, c);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = a[i] + ((t - 1.0) / t_next) * (a[i] - prev[i]);
      moved = std::max(moved, std::abs(a[i] - prev[i]));
    }
    t = t_next;
    if (it > 100 && moved < 1e-13) {
      break;
    }
  }
  return dual_value(k, y, a);
}

/// Exhaustive grid over the first n-1 alphas (step `step`), the last one
/// fixed by the equality constraint and discarded when it leaves [0, C].
inline double grid_max(const DenseMatrix& k, const std::vector<double>& y, double c, double step) {
  const std::size_t n = y.size();
  const auto ticks = static_cast<int>(std::llround(c / step));
  std::vector<int> idx(n - 1, 0);
  double best = 0.0; // a = 0 is feasible
  while (true) {
    std::vector<double> a(n);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      a[i] = std::min(c, idx[i] * step);
      s += y[i] * a[i];
    }
    a[n - 1] = -s * y[n - 1];
    if (a[n - 1] >= -1e-12 && a[n - 1] <= c + 1e-12) {
      a[n - 1] = std::clamp(a[n - 1], 0.0, c);
      best = std::max(best, dual_value(k, y, a));
    }
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] > ticks) {
      idx[pos++] = 0;
    }
    if (pos == idx.size()) {
      break;
    }
  }
  return best;
}

} // namespace hazsvm::testing
