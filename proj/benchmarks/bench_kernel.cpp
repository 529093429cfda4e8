#include "hazsvm/kernel.hpp"

#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

static void gram_matrix_rbf(benchmark::State& state) {
  const auto d = hazsvm::testing::two_gaussians(static_cast<std::size_t>(state.range(0)), 0.5, 2.0, 6, 1);
  std::vector<hazsvm::FeatureVector> rows;
  for (const auto& s : d.samples) {
    rows.push_back(s.features);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(hazsvm::gram_matrix(hazsvm::KernelConfig::rbf(0.5), rows));
  }
  state.SetComplexityN(state.range(0));
}

BENCHMARK(gram_matrix_rbf)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);
