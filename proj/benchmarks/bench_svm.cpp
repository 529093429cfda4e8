#include "hazsvm/svm.hpp"

#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

static void train_smo_rbf(benchmark::State& state) {
  const auto d = hazsvm::testing::two_gaussians(static_cast<std::size_t>(state.range(0)), 0.3, 2.0, 6, 2);
  hazsvm::SvmHyperparams hp;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hazsvm::train_smo(d, hazsvm::KernelConfig::rbf(0.2), hp));
  }
}

BENCHMARK(train_smo_rbf)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond);

// Same problem with kernel rows computed on demand instead of a dense Gram.
static void train_smo_on_demand(benchmark::State& state) {
  const auto d = hazsvm::testing::two_gaussians(static_cast<std::size_t>(state.range(0)), 0.3, 2.0, 6, 2);
  hazsvm::SvmHyperparams hp;
  hp.dense_kernel_limit = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hazsvm::train_smo(d, hazsvm::KernelConfig::rbf(0.2), hp));
  }
}

BENCHMARK(train_smo_on_demand)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
