// SPDX-License-Identifier: Apache-2.0
//
// Parallel branch-and-bound / branch-and-cut with pluggable node bounding.
//
// The search runs depth-first per worker over per-worker deques: a worker
// pushes and pops at the back of its own queue and steals from the front
// (nearest the root) of a victim's queue when it runs dry.  Workers share
// three things only: the incumbent, the node deques, and a live count of
// unfinished nodes that doubles as the termination barrier.  Problem data
// is immutable and shared read-only.

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "oracular/accpm.hpp"
#include "oracular/model.hpp"
#include "oracular/problems.hpp"

namespace oracular {

// One subproblem of the search tree.  Variable-bound tightenings are kept
// as a list of fixings applied on top of the base problem; node-local cuts
// carry lazily separated rows (branch-and-cut only).
struct NodeFixing {
  std::size_t var = 0;
  double lower = 0.0;
  double upper = 0.0;
};

struct Node {
  int depth = 0;
  std::vector<NodeFixing> fixings;
  double parent_bound = 0.0;  // valid lower bound (minimization) inherited
  std::vector<Cut> local_cuts;
  long seq = 0;  // engine-assigned creation order (best-first tie-break)
};

// Best integral-feasible solution found so far.
struct Incumbent {
  std::vector<double> x;
  double value = 0.0;  // in the problem's own sense
  long found_at = 0;   // nodes explored when it was accepted
};

struct BnbStats {
  long nodes_explored = 0;
  long nodes_pruned = 0;  // bound / infeasibility prunes
  long nodes_branched = 0;
  long nodes_leaf = 0;  // integral-accepted nodes
  long cuts_added = 0;
  std::vector<long> per_worker_nodes;
  std::size_t peak_pool_size = 0;
  long steals = 0;
};

enum class StopReason {
  kExhausted,  // tree fully explored
  kGapLimit,   // proven gap reached the configured tolerance
  kNodeLimit,
  kTimeLimit,
};

struct BnbProgress {
  long nodes_explored = 0;
  double incumbent_value = 0.0;  // problem sense; ±inf before the first
  double global_bound = 0.0;     // problem sense
  long cuts_added = 0;
  double elapsed_seconds = 0.0;
  std::vector<long> per_worker_nodes;
};

// What a bounder reports for one node.  `bound` must be a valid lower
// bound (minimization form) for every integral point under the node's
// fixings; `x` is the relaxation point used for branching; `candidate`
// is an optional integral point worth testing against the incumbent
// (it must be feasible for the *original* problem, not just the node).
struct NodeEvaluation {
  bool feasible = false;
  bool unbounded = false;
  bool integral = false;
  double bound = 0.0;
  std::vector<double> x;
  std::optional<std::size_t> branch_var;
  std::optional<std::vector<double>> candidate;
};

// Node bounder: receives the canonical minimization problem, the node's
// effective variable bounds, and the node-local cut rows.  Called
// concurrently from workers, so it must be thread-safe.
using Bounder = std::function<NodeEvaluation(
    const MipProblem&, std::span<const double> lower,
    std::span<const double> upper, const std::vector<LinearConstraint>& rows)>;

// Lazy separator: given an integral relaxation point, return violated
// globally valid cuts, or empty to accept the point.  Thread-safe.
using LazySeparator =
    std::function<std::vector<Cut>(std::span<const double> x)>;

struct BnbConfig {
  int workers = 1;
  Tolerances tolerances;
  // Early stop once (incumbent − bound) ≤ gap_tolerance·max(1,|incumbent|)
  // in minimization form; 0 runs to exhaustion.
  double gap_tolerance = 0.0;
  long node_limit = 0;             // 0: unlimited
  double time_limit_seconds = 0.0;  // 0: unlimited
  bool best_first = false;          // single-worker only
  Bounder bounder;                  // empty: LP relaxation bounding
  LazySeparator lazy_separator;
  std::function<void(const BnbProgress&)> on_progress;
  double progress_interval_seconds = 0.5;
  // Test instrumentation: called for every node that reached evaluation,
  // with the bound in minimization form and the incumbent value (same
  // form) observed at that instant.  Use with workers = 1.
  std::function<void(const Node&, const NodeEvaluation&, double incumbent)>
      node_inspect;
};

struct BnbResult {
  SolStatus status = SolStatus::kInfeasible;
  StopReason stop_reason = StopReason::kExhausted;
  Incumbent incumbent;  // x empty when nothing integral was found
  // Proven bound on the optimum in the problem's own sense: a lower
  // bound when minimizing, an upper bound when maximizing.
  double lower_bound = 0.0;
  BnbStats stats;
  double wall_seconds = 0.0;

  bool has_incumbent() const { return !incumbent.x.empty(); }
  double gap() const;  // |value − bound| / max(1, |value|); inf without both
};

// Exact solve of a validated MIP with all variables bounded.  Throws
// std::invalid_argument on malformed input, best_first with workers > 1,
// or workers < 1.
BnbResult solve_mip(const MipProblem& problem, const BnbConfig& config = {});

// Same contract as solve_mip with the worker count overridden.
BnbResult run_parallel(const MipProblem& problem, int workers,
                       const BnbConfig& config = {});

// Splits a node on the integer variable whose fractional part is closest
// to 1/2 (ties: lowest index): children tighten x_var ≤ ⌊v⌋ and
// x_var ≥ ⌈v⌉ and inherit the node's parent_bound and local cuts.
// Throws std::logic_error when no integer variable is fractional.
std::pair<Node, Node> branch(const Node& node,
                             std::span<const double> lp_solution,
                             const MipProblem& problem,
                             double integrality_tol = 1e-6);

// Decomposes an integral, degree-feasible assignment solution into cycles
// and emits Σ_{i,j∈S} x_ij ≤ |S|−1 for every short cycle S.  Empty result
// iff the solution is one full tour.  Throws std::invalid_argument on
// non-integral or degree-violating input.
std::vector<Cut> separate_subtours(const TspInstance& instance,
                                   std::span<const double> x);

// Walks the successor permutation of a single-tour assignment solution.
Tour tour_from_assignment(const TspInstance& instance,
                          std::span<const double> x);

struct TspResult {
  Tour tour;  // empty order when no tour was proven within the limits
  BnbResult details;
};

// Branch-and-cut on the assignment relaxation with lazy subtour cuts.
TspResult solve_tsp(const TspInstance& instance, const BnbConfig& config = {});

// Alternative knapsack bounder: solves the Lagrangian dual of the
// capacity row with the cutting-plane engine at every node and bounds by
// weak duality; proposes the dual's inner solution as an incumbent
// candidate whenever it is capacity-feasible.  Use with to_mip(kp).
Bounder make_knapsack_dual_bounder(const KnapsackInstance& instance);

}  // namespace oracular
