// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance gate.  Each numbered check exercises one shipping
// guarantee of the toolkit against an independent reference (brute force,
// closed forms, vertex enumeration) and prints exactly one PASS/FAIL line
// with a short metric.  The process exits with the number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "oracular/accpm.hpp"
#include "oracular/bnb.hpp"
#include "oracular/errors.hpp"
#include "oracular/linalg.hpp"
#include "oracular/model.hpp"
#include "oracular/oracle.hpp"
#include "oracular/problems.hpp"
#include "oracular/simplex.hpp"
#include "test_util.hpp"

using namespace oracular;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

DenseMatrix reconstruct(const CholeskyFactor& f) {
  const std::size_t n = f.dim();
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) {
        sum += f.lower(i, k) * f.lower(j, k);
      }
      m(i, j) = sum;
    }
  }
  return m;
}

// Trace sanity shared by the cutting-plane checks: the certified bound can
// only rise, the best seen value can only fall, and the reported gap never
// goes meaningfully negative.
bool trace_is_coherent(const std::vector<TraceRecord>& trace,
                       std::string* why) {
  double lb = -std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const TraceRecord& t : trace) {
    if (t.lower_bound < lb - 1e-12) {
      *why = "lower bound regressed at iteration " +
             std::to_string(t.iteration);
      return false;
    }
    if (t.best_value > best + 1e-12) {
      *why = "best value worsened at iteration " + std::to_string(t.iteration);
      return false;
    }
    if (t.gap < -1e-9) {
      *why = "negative gap at iteration " + std::to_string(t.iteration);
      return false;
    }
    lb = t.lower_bound;
    best = t.best_value;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 1. The three solvers reproduce brute-force answers on seeded instances.

Outcome check_exact_reference_agreement() {
  const double t0 = now_seconds();
  BnbConfig cfg;
  cfg.workers = 1;
  int solved = 0;

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const std::size_t n = 4 + seed % 9;  // 4..12 items
    const KnapsackInstance kp = generate_knapsack(n, seed);
    const Solution ref = brute_force(kp);
    const BnbResult r = solve_mip(to_mip(kp), cfg);
    if (r.status != SolStatus::kOptimal ||
        std::abs(r.incumbent.value - ref.objective) > 1e-9) {
      return {false, "knapsack seed " + std::to_string(seed) + ": got " +
                         fmt(r.incumbent.value) + ", reference " +
                         fmt(ref.objective)};
    }
    ++solved;
  }

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::size_t n = 4 + seed % 5;  // 4..8 cities
    const TspInstance tsp = generate_tsp(n, seed);
    const Tour ref = brute_force(tsp);
    const TspResult r = solve_tsp(tsp, cfg);
    if (r.details.status != SolStatus::kOptimal ||
        std::abs(r.tour.cost - ref.cost) > 1e-9) {
      return {false, "tsp seed " + std::to_string(seed) + ": got " +
                         fmt(r.tour.cost) + ", reference " + fmt(ref.cost)};
    }
    ++solved;
  }

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::size_t columns = 6 + seed % 15;  // 6..20 columns
    const std::size_t elements = 3 + seed % 6;  // 3..8 elements
    const SetPartitionInstance sp =
        generate_setpartition(elements, columns, seed);
    const Solution ref = brute_force(sp);
    const BnbResult r = solve_mip(to_mip(sp), cfg);
    if (ref.status == SolStatus::kInfeasible) {
      if (r.status != SolStatus::kInfeasible) {
        return {false, "setpart seed " + std::to_string(seed) +
                           ": reference infeasible, solver said otherwise"};
      }
    } else if (r.status != SolStatus::kOptimal ||
               std::abs(r.incumbent.value - ref.objective) > 1e-9) {
      return {false, "setpart seed " + std::to_string(seed) + ": got " +
                         fmt(r.incumbent.value) + ", reference " +
                         fmt(ref.objective)};
    }
    ++solved;
  }

  const double elapsed = now_seconds() - t0;
  if (elapsed >= 60.0) {
    return {false, "exactness sweep took " + fmt(elapsed) + "s (budget 60s)"};
  }
  return {true, std::to_string(solved) + " instances exact in " +
                    fmt(elapsed) + "s"};
}

// ---------------------------------------------------------------------------
// 2. Rank-one factor updates track fresh factorizations.

Outcome check_factor_update_accuracy() {
  Rng rng(9001);
  double worst_single = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 7;
    const double kappa = std::pow(10.0, 1 + t % 6);
    DenseMatrix a = testutil::planted_spd(n, kappa, rng);
    const CholeskyFactor base = cholesky(a);
    std::vector<double> v(n);
    for (auto& vi : v) vi = rng.uniform_real(-1.0, 1.0);
    const double sigma = rng.uniform_real(0.1, 2.0);
    const CholeskyFactor updated = rank_one_update(base, v, sigma);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) += sigma * v[i] * v[j];
      }
    }
    const double diff =
        testutil::rel_frobenius_diff(reconstruct(updated), a);
    worst_single = std::max(worst_single, diff);
    if (diff > 1e-10) {
      return {false, "update " + std::to_string(t) +
                         " drifted to relative error " + fmt(diff)};
    }
  }

  const std::size_t n = 6;
  DenseMatrix a = testutil::planted_spd(n, 1e3, rng);
  CholeskyFactor chain = cholesky(a);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(n);
    for (auto& vi : v) vi = rng.uniform_real(-1.0, 1.0);
    const double sigma = rng.uniform_real(0.1, 1.5);
    chain = rank_one_update(chain, v, sigma);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) += sigma * v[i] * v[j];
      }
    }
  }
  const double chain_diff =
      testutil::rel_frobenius_diff(reconstruct(chain), a);
  if (chain_diff > 1e-9) {
    return {false, "50-update chain drifted to " + fmt(chain_diff)};
  }
  return {true, "worst single " + fmt(worst_single) + ", 50-chain " +
                    fmt(chain_diff)};
}

// ---------------------------------------------------------------------------
// 3. The cutting-plane engine localizes the minimum of the benchmark
//    oracles within the oracle-call budget, with coherent traces.

Outcome check_cutting_plane_convergence() {
  int worst_calls = 0;
  double worst_value = 0.0;
  for (const std::size_t d : {2, 5, 10}) {
    for (const int which : {0, 1}) {
      const std::vector<double> origin(d, 0.0);
      std::unique_ptr<Oracle> oracle;
      if (which == 0) {
        oracle = std::make_unique<QuadraticOracle>(origin);
      } else {
        oracle = std::make_unique<MaxAbsOracle>(origin);
      }
      Box box;
      box.lo.assign(d, -1.0);
      box.hi.assign(d, 1.0);
      AccpmConfig cfg;
      cfg.gap_tolerance = 1e-6;
      cfg.max_iterations = 200;
      const AccpmResult r = accpm_solve(*oracle, box, cfg);
      const std::string label =
          (which == 0 ? "quadratic d=" : "maxabs d=") + std::to_string(d);
      if (r.reason != TerminationReason::kGapConverged &&
          r.reason != TerminationReason::kNullSubgradient) {
        return {false, label + " stopped without converging"};
      }
      if (r.iterations > 200) {
        return {false, label + " used " + std::to_string(r.iterations) +
                           " oracle calls"};
      }
      if (std::abs(r.best_value) > 1e-6) {
        return {false, label + " final value " + fmt(r.best_value)};
      }
      std::string why;
      if (!trace_is_coherent(r.trace, &why)) {
        return {false, label + ": " + why};
      }
      worst_calls = std::max(worst_calls, r.iterations);
      worst_value = std::max(worst_value, std::abs(r.best_value));
    }
  }
  return {true, "6 cases, max " + std::to_string(worst_calls) +
                    " calls, worst value " + fmt(worst_value)};
}

// ---------------------------------------------------------------------------
// 4. Lagrangian dual values bracket the primal optima, and the engine's
//    dual optimum matches a fine grid scan.

Outcome check_lagrangian_duality() {
  // Knapsack: every dual evaluation upper-bounds the primal maximum, on
  // the same seeded family the exactness check solves.
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const KnapsackInstance kp = generate_knapsack(4 + seed % 9, seed);
    const Solution primal = brute_force(kp);
    const KnapsackDualOracle dual(kp);
    const auto [lo, hi] = knapsack_dual_interval(kp);
    for (int k = 0; k <= 20; ++k) {
      const double lambda = lo + (hi - lo) * k / 20.0;
      const auto reply =
          std::get<OptimalityReply>(dual.query(std::vector<double>{lambda}));
      if (reply.value < primal.objective - 1e-9) {
        return {false, "knapsack seed " + std::to_string(seed) +
                           ": dual " + fmt(reply.value) + " below primal " +
                           fmt(primal.objective)};
      }
    }
  }

  // Set partitioning: every dual evaluation lower-bounds the primal minimum,
  // again over the exactness-check family.
  Rng rng(4242);
  int sp_checked = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const SetPartitionInstance sp =
        generate_setpartition(3 + seed % 6, 6 + seed % 15, seed);
    const Solution primal = brute_force(sp);
    if (primal.status != SolStatus::kOptimal) continue;
    const SetPartitionDualOracle dual(sp);
    const auto [lo, hi] = setpartition_dual_interval(sp);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> lambda(sp.num_elements);
      for (auto& l : lambda) l = rng.uniform_real(lo, hi);
      const auto reply = std::get<OptimalityReply>(dual.query(lambda));
      if (reply.value > primal.objective + 1e-9) {
        return {false, "setpart seed " + std::to_string(seed) + ": dual " +
                           fmt(reply.value) + " above primal " +
                           fmt(primal.objective)};
      }
    }
    ++sp_checked;
  }
  if (sp_checked < 10) {
    return {false, "only " + std::to_string(sp_checked) +
                       " feasible partitioning instances"};
  }

  // Engine-found dual optimum vs an independent 1e-4-step grid scan.  The
  // scan's own resolution is step times the kink slope — up to several
  // 1e-3 with integer weights near 100 — so on generated instances the
  // match is judged relative to the dual value, with the engine also
  // required to do no worse than the scan.  The small-weight running
  // example keeps the absolute 1e-3 reading, where it is attainable.
  double worst_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const KnapsackInstance kp = generate_knapsack(4 + seed % 5, seed);
    const KnapsackDualOracle dual(kp);
    const auto [lo, hi] = knapsack_dual_interval(kp);
    AccpmConfig cfg;
    cfg.gap_tolerance = 1e-8;
    cfg.max_iterations = 400;
    const AccpmResult r = accpm_solve(dual, Box{{lo}, {hi}}, cfg);
    if (r.reason != TerminationReason::kGapConverged &&
        r.reason != TerminationReason::kNullSubgradient) {
      return {false, "dual solve for seed " + std::to_string(seed) +
                         " did not converge"};
    }
    const double grid = testutil::grid_scan_dual_min(kp, hi);
    // The engine certifies a relative gap, so its value may exceed the true
    // minimum by gap_tolerance scaled to the objective's magnitude.
    const double slack = 1e-6 * std::max(1.0, std::abs(grid));
    if (r.best_value > grid + slack) {
      return {false, "dual optimum for seed " + std::to_string(seed) +
                         " sits above the grid scan: " + fmt(r.best_value) +
                         " vs " + fmt(grid)};
    }
    const double rel =
        std::abs(r.best_value - grid) / std::max(1.0, std::abs(grid));
    worst_rel = std::max(worst_rel, rel);
    if (rel > 1e-3) {
      return {false, "dual optimum for seed " + std::to_string(seed) +
                         " misses the grid scan by " + fmt(rel) +
                         " relative"};
    }
  }

  {
    const KnapsackInstance kp = testutil::example_knapsack();
    const KnapsackDualOracle dual(kp);
    const auto [lo, hi] = knapsack_dual_interval(kp);
    AccpmConfig cfg;
    cfg.gap_tolerance = 1e-8;
    cfg.max_iterations = 400;
    const AccpmResult r = accpm_solve(dual, Box{{lo}, {hi}}, cfg);
    const double grid = testutil::grid_scan_dual_min(kp, hi);
    if (std::abs(r.best_value - grid) > 1e-3) {
      return {false, "running example dual " + fmt(r.best_value) +
                         " vs grid " + fmt(grid)};
    }
  }
  return {true, "200 kp + " + std::to_string(sp_checked) +
                    " sp bracketed; grid-scan rel gap <= " + fmt(worst_rel)};
}

// ---------------------------------------------------------------------------
// 5. Every termination reason is reachable and correctly reported.

Outcome check_termination_reasons() {
  Box box;
  box.lo = {-1.0, -1.0};
  box.hi = {1.0, 1.0};
  AccpmConfig cfg;
  cfg.gap_tolerance = 1e-6;

  const QuadraticOracle offset({0.3, 0.3});
  const AccpmResult converged = accpm_solve(offset, box, cfg);
  if (converged.reason != TerminationReason::kGapConverged) {
    return {false, "offset quadratic did not stop on the gap"};
  }

  const QuadraticOracle centered({0.0, 0.0});
  const AccpmResult null_g = accpm_solve(centered, box, cfg);
  if (null_g.reason != TerminationReason::kNullSubgradient) {
    return {false, "centered quadratic did not report the null subgradient"};
  }

  AccpmConfig capped = cfg;
  capped.max_iterations = 3;
  const AccpmResult starved = accpm_solve(offset, box, capped);
  if (starved.reason != TerminationReason::kMaxIterations ||
      starved.iterations != 3) {
    return {false, "iteration cap was not honored"};
  }

  const FunctionOracle lazy_cut(2, [](std::span<const double> y) -> OracleReply {
    FeasibilityReply r;
    r.normal = {1.0, 0.0};
    r.rhs = y[0] + 0.3;  // never violated at the query point
    return r;
  });
  const AccpmResult incoherent = accpm_solve(lazy_cut, box, cfg);
  if (incoherent.reason != TerminationReason::kIncoherentOracle) {
    return {false, "non-cutting feasibility reply was not flagged"};
  }

  const FunctionOracle broken(2, [](std::span<const double>) -> OracleReply {
    throw OracleFailure("sensor went dark");
  });
  const AccpmResult failed = accpm_solve(broken, box, cfg);
  if (failed.reason != TerminationReason::kCriticalFailure ||
      failed.diagnostic.empty()) {
    return {false, "oracle failure was not surfaced"};
  }

  return {true, "all 5 stop reasons observed"};
}

// ---------------------------------------------------------------------------
// 6. Bounded-memory cut policies land within twice the gap tolerance of
//    the keep-everything run.

Outcome check_cut_policies() {
  const double tol = 1e-6;
  int cases = 0;

  // The benchmark suite itself: every policy under the n+5 budget must
  // finish within twice the gap tolerance of the unbounded-memory run.
  for (const std::size_t d : {2, 5, 10}) {
    for (const int which : {0, 1}) {
      const std::vector<double> origin(d, 0.0);
      std::unique_ptr<Oracle> oracle;
      if (which == 0) {
        oracle = std::make_unique<QuadraticOracle>(origin);
      } else {
        oracle = std::make_unique<MaxAbsOracle>(origin);
      }
      Box box;
      box.lo.assign(d, -1.0);
      box.hi.assign(d, 1.0);
      AccpmConfig base;
      base.gap_tolerance = tol;
      base.max_iterations = 400;
      const AccpmResult keep = accpm_solve(*oracle, box, base);
      const double band = 2.0 * tol * std::max(1.0, std::abs(keep.best_value));

      for (const CutPolicy policy :
           {CutPolicy::kDropRedundant, CutPolicy::kAggregate,
            CutPolicy::kWeighted}) {
        AccpmConfig cfg = base;
        cfg.policy = policy;
        cfg.cut_budget = d + 5;
        const AccpmResult r = accpm_solve(*oracle, box, cfg);
        const double miss = std::abs(r.best_value - keep.best_value);
        if (miss > band) {
          return {false, "policy " + std::to_string(int(policy)) + " d=" +
                             std::to_string(d) + " missed keep-all by " +
                             fmt(miss)};
        }
        std::string why;
        if (!trace_is_coherent(r.trace, &why)) {
          return {false, "policy trace: " + why};
        }
        ++cases;
      }
    }
  }

  // Harder off-center variants: reweighting holds the tight budget;
  // dropping and aggregating need room for a few cut generations before
  // they can certify the same gap.
  for (const std::size_t d : {2, 5}) {
    for (const int which : {0, 1}) {
      const std::vector<double> center(d, 0.3);
      std::unique_ptr<Oracle> oracle;
      if (which == 0) {
        oracle = std::make_unique<QuadraticOracle>(center);
      } else {
        oracle = std::make_unique<MaxAbsOracle>(center);
      }
      Box box;
      box.lo.assign(d, -1.0);
      box.hi.assign(d, 1.0);
      AccpmConfig base;
      base.gap_tolerance = tol;
      base.max_iterations = 400;
      const AccpmResult keep = accpm_solve(*oracle, box, base);
      const double band = 2.0 * tol * std::max(1.0, std::abs(keep.best_value));

      struct Variant {
        CutPolicy policy;
        std::size_t budget;
      };
      const Variant variants[] = {
          {CutPolicy::kWeighted, d + 5},
          {CutPolicy::kDropRedundant, 4 * d + 20},
          {CutPolicy::kAggregate, 4 * d + 20},
      };
      for (const Variant& v : variants) {
        AccpmConfig cfg = base;
        cfg.policy = v.policy;
        cfg.cut_budget = v.budget;
        const AccpmResult r = accpm_solve(*oracle, box, cfg);
        const double miss = std::abs(r.best_value - keep.best_value);
        if (r.reason != TerminationReason::kGapConverged || miss > band) {
          return {false, "off-center policy " + std::to_string(int(v.policy)) +
                             " d=" + std::to_string(d) + " missed by " +
                             fmt(miss)};
        }
        std::string why;
        if (!trace_is_coherent(r.trace, &why)) {
          return {false, "off-center policy trace: " + why};
        }
        ++cases;
      }
    }
  }
  return {true, std::to_string(cases) + " policy runs within band"};
}

// ---------------------------------------------------------------------------
// 7. Parallel search: worker-count-independent answers, repeatable
//    single-worker runs, and real load sharing on big trees.

Outcome check_parallel_consistency() {
  // Identical optima across worker counts on the whole seeded family the
  // exactness check solves.  Objectives are integer-valued, so equality is
  // exact, not approximate.
  const auto sweep_workers = [](const std::string& label,
                                const std::function<BnbResult(int)>& solve)
      -> std::optional<Outcome> {
    double reference = 0.0;
    SolStatus reference_status = SolStatus::kOptimal;
    for (const int workers : {1, 2, 4, 8}) {
      const BnbResult r = solve(workers);
      if (workers == 1) {
        reference = r.incumbent.value;
        reference_status = r.status;
        continue;
      }
      if (r.status != reference_status ||
          (r.status == SolStatus::kOptimal &&
           r.incumbent.value != reference)) {
        return Outcome{false, label + " changed with " +
                                  std::to_string(workers) + " workers: " +
                                  fmt(r.incumbent.value) + " vs " +
                                  fmt(reference)};
      }
    }
    return std::nullopt;
  };

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const KnapsackInstance kp = generate_knapsack(4 + seed % 9, seed);
    const MipProblem mip = to_mip(kp);
    const auto bad = sweep_workers(
        "knapsack seed " + std::to_string(seed), [&](int workers) {
          BnbConfig cfg;
          cfg.workers = workers;
          return solve_mip(mip, cfg);
        });
    if (bad) return *bad;
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const TspInstance tsp = generate_tsp(4 + seed % 5, seed);
    const auto bad = sweep_workers(
        "tsp seed " + std::to_string(seed), [&](int workers) {
          BnbConfig cfg;
          cfg.workers = workers;
          return solve_tsp(tsp, cfg).details;
        });
    if (bad) return *bad;
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const SetPartitionInstance sp =
        generate_setpartition(3 + seed % 6, 6 + seed % 15, seed);
    const MipProblem mip = to_mip(sp);
    const auto bad = sweep_workers(
        "setpart seed " + std::to_string(seed), [&](int workers) {
          BnbConfig cfg;
          cfg.workers = workers;
          return solve_mip(mip, cfg);
        });
    if (bad) return *bad;
  }

  // Single-worker runs are bytewise repeatable.
  {
    const KnapsackInstance kp = generate_knapsack(12, 99);
    const MipProblem mip = to_mip(kp);
    BnbConfig cfg;
    cfg.workers = 1;
    const BnbResult a = solve_mip(mip, cfg);
    const BnbResult b = solve_mip(mip, cfg);
    const bool same_x =
        a.incumbent.x.size() == b.incumbent.x.size() &&
        std::memcmp(a.incumbent.x.data(), b.incumbent.x.data(),
                    a.incumbent.x.size() * sizeof(double)) == 0;
    if (!same_x || a.incumbent.value != b.incumbent.value ||
        a.stats.nodes_explored != b.stats.nodes_explored) {
      return {false, "repeated single-worker runs diverged"};
    }
  }

  // Load balance on a tree big enough to matter: strongly correlated
  // weights make the relaxation bound nearly uninformative.
  Rng hard_rng(77);
  KnapsackInstance hard;
  const std::size_t n = 26;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 50.0 + double(hard_rng.uniform_int(0, 10));
    hard.weight.push_back(w);
    hard.profit.push_back(w + double(hard_rng.uniform_int(1, 5)));
    hard.multiplicity.push_back(1);
    total += w;
  }
  hard.capacity = std::floor(0.5 * total);
  BnbConfig cfg;
  cfg.workers = 4;
  cfg.node_limit = 200000;  // the tree, not its completion, is the subject
  const BnbResult r = solve_mip(to_mip(hard), cfg);
  long max_share = 0;
  long sum = 0;
  for (const long c : r.stats.per_worker_nodes) {
    max_share = std::max(max_share, c);
    sum += c;
  }
  if (r.stats.nodes_explored < 500) {
    return {false, "balance run explored only " +
                       std::to_string(r.stats.nodes_explored) + " nodes"};
  }
  if (sum != r.stats.nodes_explored) {
    return {false, "per-worker counts do not add up"};
  }
  const double share = double(max_share) / double(sum);
  if (share > 0.9) {
    return {false, "one worker took " + fmt(100.0 * share) + "% of " +
                       std::to_string(sum) + " nodes"};
  }
  return {true, std::to_string(r.stats.nodes_explored) +
                    "-node tree, busiest worker " + fmt(100.0 * share) + "%"};
}

// ---------------------------------------------------------------------------
// 8. Mixed-precision refinement: fast convergence while the condition
//    number cooperates, honest failure when it does not.

Outcome check_mixed_precision() {
  Rng rng(606);
  int worst_steps = 0;
  double worst_be = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 3 + t % 6;
    const double kappa = std::pow(10.0, 2 + t % 5);  // up to 1e6
    const DenseMatrix a = testutil::planted_spd(n, kappa, rng);
    std::vector<double> b(n);
    for (auto& bi : b) bi = rng.uniform_real(-1.0, 1.0);
    const MixedSolveResult r = mixed_precision_solve(a, b);
    worst_steps = std::max(worst_steps, r.refinement_steps);
    worst_be = std::max(worst_be, r.backward_error);
    if (r.refinement_steps > 5 || r.backward_error > 1e-12) {
      return {false, "kappa " + fmt(kappa) + " needed " +
                         std::to_string(r.refinement_steps) + " steps, be " +
                         fmt(r.backward_error)};
    }
  }

  Rng bad_rng(13);
  const DenseMatrix ill = testutil::planted_spd(10, 1e14, bad_rng);
  std::vector<double> b(10, 1.0);
  bool threw = false;
  try {
    (void)mixed_precision_solve(ill, b);
  } catch (const NoConvergence&) {
    threw = true;
  }
  if (!threw) {
    return {false, "kappa 1e14 system did not raise the failure signal"};
  }
  return {true, "20 systems: <= " + std::to_string(worst_steps) +
                    " steps, worst backward error " + fmt(worst_be) +
                    "; 1e14 refused"};
}

// ---------------------------------------------------------------------------
// 9. Every subtour cut emitted while solving small TSPs admits every
//    complete tour.

Outcome check_subtour_cut_validity() {
  long cuts_audited = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t n = 4 + seed % 3;  // 4..6 cities
    const TspInstance tsp = generate_tsp(n, seed);

    // Mirror the branch-and-cut setup, but intercept the separator so every
    // emitted cut is recorded before the search consumes it.
    std::vector<Cut> emitted;
    BnbConfig cfg;
    cfg.workers = 1;
    cfg.lazy_separator = [&](std::span<const double> x) {
      std::vector<Cut> cuts = separate_subtours(tsp, x);
      emitted.insert(emitted.end(), cuts.begin(), cuts.end());
      return cuts;
    };
    const BnbResult r = solve_mip(to_mip(tsp), cfg);
    if (r.status != SolStatus::kOptimal) {
      return {false, "tsp seed " + std::to_string(seed) + " did not solve"};
    }
    const Tour ref = brute_force(tsp);
    if (std::abs(r.incumbent.value - ref.cost) > 1e-9) {
      return {false, "tsp seed " + std::to_string(seed) +
                         " optimum drifted under recorded cuts"};
    }

    for (const Cut& cut : emitted) {
      bool ok = true;
      testutil::for_each_directed_tour(n, [&](const std::vector<int>& order) {
        if (!ok) return;
        const std::vector<double> x = testutil::assignment_of_tour(n, order);
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += cut.normal[j] * x[j];
        if (lhs > cut.rhs + 1e-9) ok = false;
      });
      if (!ok) {
        return {false, "a cut from seed " + std::to_string(seed) +
                           " excludes a complete tour"};
      }
      ++cuts_audited;
    }
  }
  return {true, std::to_string(cuts_audited) +
                    " cuts audited against every complete tour"};
}

// ---------------------------------------------------------------------------
// 10. The simplex core agrees with vertex enumeration and classifies
//     degenerate outcomes.

Outcome check_lp_against_vertex_enumeration() {
  Rng rng(77);
  int compared = 0;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const MipProblem lp = testutil::random_box_lp(rng);
    const auto ref = testutil::enumerate_polytope_optimum(lp);
    const LpResult r = solve_lp(lp);
    if (!ref.has_value()) {
      if (r.status == LpStatus::kOptimal) {
        return {false, "lp " + std::to_string(t) +
                           ": solver found an optimum the enumerator did not"};
      }
      continue;
    }
    if (r.status != LpStatus::kOptimal) {
      return {false, "lp " + std::to_string(t) + " not solved to optimality"};
    }
    const double diff = std::abs(r.objective - *ref);
    worst = std::max(worst, diff);
    if (diff > 1e-8) {
      return {false, "lp " + std::to_string(t) + " off by " + fmt(diff)};
    }
    ++compared;
  }
  if (compared < 45) {
    return {false, "only " + std::to_string(compared) + " LPs compared"};
  }

  MipProblem infeasible;
  infeasible.sense = Sense::kMinimize;
  infeasible.objective = {1.0, 1.0};
  infeasible.lower = {0.0, 0.0};
  infeasible.upper = {std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
  infeasible.kind = {VarKind::kContinuous, VarKind::kContinuous};
  infeasible.constraints.push_back(
      {{1.0, 1.0}, Relation::kLessEqual, -1.0});
  if (solve_lp(infeasible).status != LpStatus::kInfeasible) {
    return {false, "empty polytope not classified as infeasible"};
  }

  MipProblem unbounded;
  unbounded.sense = Sense::kMinimize;
  unbounded.objective = {-1.0};
  unbounded.lower = {0.0};
  unbounded.upper = {std::numeric_limits<double>::infinity()};
  unbounded.kind = {VarKind::kContinuous};
  if (solve_lp(unbounded).status != LpStatus::kUnbounded) {
    return {false, "free descent direction not classified as unbounded"};
  }

  return {true, std::to_string(compared) + " LPs matched (worst " +
                    fmt(worst) + "); degenerate cases classified"};
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Check> checks = {
      {"exact-reference-agreement", check_exact_reference_agreement},
      {"factor-update-accuracy", check_factor_update_accuracy},
      {"cutting-plane-convergence", check_cutting_plane_convergence},
      {"lagrangian-duality", check_lagrangian_duality},
      {"termination-reasons", check_termination_reasons},
      {"cut-policy-equivalence", check_cut_policies},
      {"parallel-consistency", check_parallel_consistency},
      {"mixed-precision-refinement", check_mixed_precision},
      {"subtour-cut-validity", check_subtour_cut_validity},
      {"lp-vertex-agreement", check_lp_against_vertex_enumeration},
  };

  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome outcome;
    try {
      outcome = checks[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("unexpected exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "/"
              << checks.size() << "] " << checks[i].name << " — "
              << outcome.detail << "\n";
  }
  if (failures == 0) {
    std::cout << "all " << checks.size() << " acceptance checks passed\n";
  } else {
    std::cout << failures << " acceptance check(s) failed\n";
  }
  return failures;
}
