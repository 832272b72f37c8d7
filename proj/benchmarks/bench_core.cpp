// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the dense kernels: fresh factorization vs rank-one
// update, normal-matrix assembly, and the LP solver.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "oracular/linalg.hpp"
#include "oracular/model.hpp"
#include "oracular/problems.hpp"
#include "oracular/simplex.hpp"

namespace {

using namespace oracular;

DenseMatrix random_spd(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = rng.uniform_real(-1.0, 1.0);
    }
  }
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += a(k, i) * a(k, j);
      m(i, j) = sum;
    }
    m(i, i) += static_cast<double>(n);
  }
  return m;
}

void BM_CholeskyFresh(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix m = random_spd(n, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cholesky(m));
  }
}
BENCHMARK(BM_CholeskyFresh)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_CholeskyRankOneUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CholeskyFactor factor = cholesky(random_spd(n, 17));
  Rng rng(19);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform_real(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_one_update(factor, v, 0.5));
  }
}
BENCHMARK(BM_CholeskyRankOneUpdate)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_FormNormalMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t rows = 4 * n;
  Rng rng(23);
  DenseMatrix a(rows, n);
  std::vector<double> s(rows), w(rows, 1.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform_real(-1.0, 1.0);
    s[i] = rng.uniform_real(0.1, 2.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(form_normal_matrix(a, s, w));
  }
}
BENCHMARK(BM_FormNormalMatrix)->Arg(8)->Arg(16)->Arg(32);

void BM_MixedPrecisionSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix m = random_spd(n, 29);
  Rng rng(31);
  std::vector<double> b(n);
  for (double& x : b) x = rng.uniform_real(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixed_precision_solve(m, b));
  }
}
BENCHMARK(BM_MixedPrecisionSolve)->Arg(16)->Arg(64);

void BM_SolveLp(benchmark::State& state) {
  // Knapsack LP relaxations: one dense row plus bounds.
  const auto n = static_cast<std::size_t>(state.range(0));
  MipProblem lp = to_mip(generate_knapsack(n, 37));
  lp = relax(lp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_lp(lp));
  }
}
BENCHMARK(BM_SolveLp)->Arg(16)->Arg(64)->Arg(256);

}  // namespace
