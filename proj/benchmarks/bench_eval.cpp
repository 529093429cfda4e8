#include "hazsvm/eval.hpp"

#include <benchmark/benchmark.h>

#include <random>

static void roc_auc_ranks(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> scores;
  std::vector<hazsvm::Label> truths;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const bool hazard = i % 5 == 0;
    truths.push_back(hazard ? hazsvm::Label::hazard : hazsvm::Label::normal);
    scores.push_back(g(rng) + (hazard ? 1.0 : 0.0));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(hazsvm::roc_auc(scores, truths));
  }
  state.SetComplexityN(state.range(0));
}

BENCHMARK(roc_auc_ranks)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);
