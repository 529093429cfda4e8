#include "hazsvm/tuning.hpp"

#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

static void grid_search_default_grids(benchmark::State& state) {
  const auto d = hazsvm::testing::two_gaussians(300, 0.15, 2.0, 4, 4);
  hazsvm::GridSearchOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hazsvm::grid_search(d, hazsvm::default_c_grid(), hazsvm::default_gamma_grid(), options));
  }
}

BENCHMARK(grid_search_default_grids)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
