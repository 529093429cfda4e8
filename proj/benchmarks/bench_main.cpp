#include <benchmark/benchmark.h>

// The distro benchmark_main archive is LTO-only, so the main lives here.
BENCHMARK_MAIN();
