// OpenMP batch kernels against their serial references.

#include <benchmark/benchmark.h>

#include "stowrl/bench.hpp"

namespace {

using namespace stowrl;

const std::vector<ProblemInstance>& instances() {
  static const auto set = generate_batch_serial(GenSpec{}, 64);
  return set;
}

void BM_GenerateSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(generate_batch_serial(GenSpec{}, static_cast<std::size_t>(state.range(0))));
}

void BM_GenerateParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(generate_batch(GenSpec{}, static_cast<std::size_t>(state.range(0))));
}

void BM_Solve(benchmark::State& state, const char* policy, bool parallel) {
  const PolicySpec spec = parse_policy(policy);
  for (auto _ : state) {
    auto r = parallel ? solve_batch(spec, instances()) : solve_batch_serial(spec, instances());
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(instances().size()));
}

}  // namespace

BENCHMARK(BM_GenerateSerial)->Arg(256);
BENCHMARK(BM_GenerateParallel)->Arg(256);
BENCHMARK_CAPTURE(BM_Solve, exact_serial, "exact", false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, exact_parallel, "exact", true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, lookahead1_serial, "lookahead:1", false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, lookahead1_parallel, "lookahead:1", true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
