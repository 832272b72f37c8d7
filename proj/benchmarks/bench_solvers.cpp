// SPDX-License-Identifier: Apache-2.0
//
// End-to-end benchmarks: the cutting-plane engine on smooth/nonsmooth
// oracles and the branch-and-bound worker sweep.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "oracular/accpm.hpp"
#include "oracular/bnb.hpp"
#include "oracular/oracle.hpp"
#include "oracular/problems.hpp"

namespace {

using namespace oracular;

void BM_AccpmQuadratic(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const QuadraticOracle oracle(std::vector<double>(dim, 0.3));
  Box box;
  box.lo.assign(dim, -1.0);
  box.hi.assign(dim, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(accpm_solve(oracle, box, {}));
  }
}
BENCHMARK(BM_AccpmQuadratic)->Arg(2)->Arg(5)->Arg(10);

void BM_AccpmKnapsackDual(benchmark::State& state) {
  const KnapsackInstance kp = generate_knapsack(
      static_cast<std::size_t>(state.range(0)), 41);
  const KnapsackDualOracle oracle(kp);
  const auto interval = knapsack_dual_interval(kp);
  Box box;
  box.lo = {interval.first};
  box.hi = {interval.second};
  for (auto _ : state) {
    benchmark::DoNotOptimize(accpm_solve(oracle, box, {}));
  }
}
BENCHMARK(BM_AccpmKnapsackDual)->Arg(16)->Arg(64);

void BM_BnbKnapsack(benchmark::State& state) {
  const MipProblem mip = to_mip(generate_knapsack(14, 43));
  BnbConfig cfg;
  cfg.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mip(mip, cfg));
  }
}
BENCHMARK(BM_BnbKnapsack)->Arg(1)->Arg(2)->Arg(4)->Arg(8)
    ->Unit(benchmark::kMillisecond);

void BM_BnbTsp(benchmark::State& state) {
  const TspInstance tsp = generate_tsp(
      static_cast<std::size_t>(state.range(0)), 47);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_tsp(tsp, {}));
  }
}
BENCHMARK(BM_BnbTsp)->Arg(5)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
