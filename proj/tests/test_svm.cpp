#include "hazsvm/error.hpp"
#include "hazsvm/svm.hpp"

#include "support/qp_oracle.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace hazsvm;
using hazsvm::testing::from_rows;

namespace {

SvmHyperparams with_c(double c, double tol = 1e-3) {
  SvmHyperparams hp;
  hp.c = c;
  hp.tolerance = tol;
  return hp;
}

testing::DenseMatrix kernel_of(const Dataset& d, const KernelConfig& k) {
  testing::DenseMatrix m(d.size(), std::vector<double>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      m[i][j] = kernel_eval(k, d.samples[i].features, d.samples[j].features);
    }
  }
  return m;
}

std::vector<double> labels_of(const Dataset& d) {
  std::vector<double> y;
  for (const auto& s : d.samples) {
    y.push_back(to_real(s.label));
  }
  return y;
}

TrainedSvm empty_model(std::size_t features, double bias) {
  TrainedSvm m;
  m.kernel = KernelConfig::linear();
  m.bias = bias;
  m.normalization = NormalizationStats::identity(features);
  m.feature_mask = FeatureMask::all(features);
  return m;
}

} // namespace

TEST_CASE("two-point linear problem has the analytic solution") {
  const auto d = from_rows({{{-1.0}, -1}, {{1.0}, +1}});
  const auto m = train_smo(d, KernelConfig::linear(), with_c(10.0, 1e-9));
  const auto alpha = training_alphas(m, d.size());
  CHECK(alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(alpha[1] == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(m.weight_vector);
  CHECK((*m.weight_vector)[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.bias == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(decision_value(m, FeatureVector{0.0}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(dual_objective(m, d) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(max_kkt_violation(m, d) <= 1e-6);
}

TEST_CASE("duplicated points keep the same decision function") {
  const auto d = from_rows({{{-1.0}, -1}, {{1.0}, +1}, {{-1.0}, -1}, {{1.0}, +1}});
  const auto m = train_smo(d, KernelConfig::linear(), with_c(10.0, 1e-9));
  for (double x : {-1.0, 0.0, 1.0}) {
    CHECK(decision_value(m, FeatureVector{x}) == doctest::Approx(x).scale(1.0).epsilon(1e-6));
  }
}

TEST_CASE("XOR needs the rbf kernel") {
  const auto d = testing::xor_set();
  const auto rbf = train_smo(d, KernelConfig::rbf(1.0), with_c(10.0));
  for (const auto& s : d.samples) {
    CHECK(predict(rbf, s.features) == s.label);
  }
  const auto lin = train_smo(d, KernelConfig::linear(), with_c(10.0));
  std::size_t wrong = 0;
  for (const auto& s : d.samples) {
    wrong += predict(lin, s.features) != s.label ? 1 : 0;
  }
  CHECK(wrong >= 1);
}

TEST_CASE("predict tie-break and sign rule") {
  CHECK(predict(empty_model(1, 0.0), FeatureVector{3.0}) == Label::hazard);
  CHECK(predict(empty_model(1, -0.3), FeatureVector{3.0}) == Label::normal);

  const auto d = testing::two_gaussians(60, 0.3, 2.0, 2, 8);
  const auto m = train_smo(d, KernelConfig::rbf(0.7), with_c(1.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const FeatureVector x{u(rng), u(rng)};
    CHECK(predict(m, x) == (decision_value(m, x) >= 0.0 ? Label::hazard : Label::normal));
  }
}

TEST_CASE("diagnostics on an untrained model") {
  const auto d = from_rows({{{-2.0, 1.0}, -1}, {{2.0, 0.5}, +1}, {{3.0, 1.0}, +1}});
  const auto m = empty_model(2, 0.0);
  CHECK(dual_objective(m, d) == 0.0);
  CHECK(max_kkt_violation(m, d) == 1.0);
}

TEST_CASE("free support vectors sit on the margin") {
  const auto d = testing::two_gaussians(80, 0.4, 3.0, 2, 21);
  const auto hp = with_c(5.0);
  const auto m = train_smo(d, KernelConfig::rbf(0.5), hp);
  const auto alpha = training_alphas(m, d.size());
  std::size_t free = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (alpha[i] > 0.0 && alpha[i] < hp.c) {
      ++free;
      const double yf = to_real(d.samples[i].label) * decision_value(m, d.samples[i].features);
      CHECK(std::abs(yf - 1.0) <= hp.tolerance);
    }
  }
  CHECK(free > 0);
}

TEST_CASE("linear weight vector reproduces the dual expansion") {
  const auto d = testing::two_gaussians(70, 0.5, 1.5, 3, 5);
  const auto m = train_smo(d, KernelConfig::linear(), with_c(1.0));
  REQUIRE(m.weight_vector);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const FeatureVector x{g(rng), g(rng), g(rng)};
    const double primal = std::inner_product(x.begin(), x.end(), m.weight_vector->begin(), m.bias);
    CHECK(decision_value(m, x) == doctest::Approx(primal).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("model invariants and per-step constraints") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto d = testing::two_gaussians(120, 0.25, 2.0, 2, seed);
    const auto hp = with_c(2.0);
    double last = -1.0;
    bool monotone = true, feasible = true;
    const auto m = train_smo(d, KernelConfig::rbf(1.0), hp, [&](const SmoStep& step) {
      double eq = 0.0;
      for (std::size_t i = 0; i < step.alpha.size(); ++i) {
        feasible = feasible && step.alpha[i] >= 0.0 && step.alpha[i] <= hp.c;
        eq += step.alpha[i] * to_real(step.labels[i]);
      }
      feasible = feasible && std::abs(eq) <= 1e-6;
      monotone = monotone && step.objective >= last - 1e-12;
      last = step.objective;
    });
    CHECK(feasible);
    CHECK(monotone);
    CHECK(max_kkt_violation(m, d) <= hp.tolerance);
    CHECK(std::accumulate(m.dual_coefficients.begin(), m.dual_coefficients.end(), 0.0) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    for (double c : m.dual_coefficients) {
      CHECK(std::abs(c) <= hp.c);
    }
    CHECK(!m.support_vectors.empty());
    CHECK(dual_objective(m, d) == doctest::Approx(last).epsilon(1e-9));
  }
}

TEST_CASE("small problems agree with independent QP solvers") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 2); // 2 or 3 points
    Dataset d;
    d.feature_names = {"a", "b"};
    for (std::size_t i = 0; i < n; ++i) {
      d.samples.push_back({{u(rng), u(rng)}, i == 0 ? Label::hazard : (i == 1 ? Label::normal : (trial % 4 < 2 ? Label::hazard : Label::normal))});
    }
    const double c = trial % 3 == 0 ? 10.0 : 0.5;
    const auto kernel = trial % 2 ? KernelConfig::rbf(1.0) : KernelConfig::linear();
    const auto m = train_smo(d, kernel, with_c(c));
    const auto k = kernel_of(d, kernel);
    const auto y = labels_of(d);
    const double pg = testing::projected_gradient_max(k, y, c);
    const double grid = testing::grid_max(k, y, c, 0.01);
    CHECK(grid <= pg + 1e-9);
    CHECK(dual_objective(m, d) == doctest::Approx(pg).scale(1.0).epsilon(1e-3));
    ++checked;
  }
  CHECK(checked == 24);
}

TEST_CASE("rbf decisions depend only on gamma * d^2") {
  const auto d = testing::two_gaussians(50, 0.4, 2.0, 2, 13);
  auto scaled = d;
  const double s = 3.0;
  for (auto& row : scaled.samples) {
    for (auto& v : row.features) {
      v *= s;
    }
  }
  const auto a = train_smo(d, KernelConfig::rbf(0.8), with_c(1.0));
  const auto b = train_smo(scaled, KernelConfig::rbf(0.8 / (s * s)), with_c(1.0));
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(predict(a, d.samples[i].features) == predict(b, scaled.samples[i].features));
  }
}

TEST_CASE("on-demand kernel rows match the dense Gram path") {
  const auto d = testing::two_gaussians(90, 0.3, 2.0, 3, 4);
  auto hp = with_c(1.0);
  const auto dense = train_smo(d, KernelConfig::rbf(0.4), hp);
  hp.dense_kernel_limit = 0;
  const auto lazy = train_smo(d, KernelConfig::rbf(0.4), hp);
  CHECK(dense.dual_coefficients == lazy.dual_coefficients);
  CHECK(dense.bias == lazy.bias);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto d = testing::two_gaussians(100, 0.2, 1.0, 2, 6);
  auto hp = with_c(3.0);
  hp.seed = 77;
  const auto a = train_smo(d, KernelConfig::rbf(2.0), hp);
  const auto b = train_smo(d, KernelConfig::rbf(2.0), hp);
  CHECK(a.dual_coefficients == b.dual_coefficients);
  CHECK(a.support_indices == b.support_indices);
  CHECK(a.bias == b.bias);
}

TEST_CASE("train_smo error paths") {
  const auto one_class = from_rows({{{1.0}, 1}, {{2.0}, 1}});
  try {
    train_smo(one_class, KernelConfig::rbf(1.0), with_c(1.0));
    FAIL("expected degenerate labels");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_labels);
  }

  const auto noisy = testing::two_gaussians(200, 0.5, 0.5, 2, 9);
  auto hp = with_c(100.0);
  hp.max_iterations = 1;
  try {
    train_smo(noisy, KernelConfig::rbf(10.0), hp);
    FAIL("expected convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.kind() == ErrorKind::convergence);
    CHECK(e.kkt_violation() > hp.tolerance);
    CHECK(e.kkt_violation() == doctest::Approx(max_kkt_violation(e.best_iterate(), noisy)));
    CHECK(!e.best_iterate().support_vectors.empty());
  }

  CHECK_THROWS_AS(train_smo(noisy, KernelConfig::rbf(1.0), with_c(-1.0)), Error);
  CHECK_THROWS_AS(decision_value(empty_model(2, 0.0), FeatureVector{1.0}), Error);
}
