// SPDX-License-Identifier: Apache-2.0

#ifndef ORACULAR_ACCPM_HPP_
#define ORACULAR_ACCPM_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oracular/linalg.hpp"
#include "oracular/oracle.hpp"

namespace oracular {

// Axis-aligned box lo ≤ x ≤ hi bounding the search; the initial
// localization region.  Bounds must be finite with lo < hi.
struct Box {
  std::vector<double> lo, hi;

  std::size_t dim() const { return lo.size(); }
  std::vector<double> midpoint() const;
};

enum class CutOrigin { kOptimality, kFeasibility, kAggregate };

// Rolling window of the last few slack-to-median ratios observed at
// consecutive centers; feeds the redundancy heuristic.
class SlackHistory {
 public:
  static constexpr std::size_t kWindow = 5;

  void push(double ratio);
  bool full() const { return count_ >= kWindow; }
  bool all_above(double threshold) const;

 private:
  std::array<double, kWindow> ratios_{};
  std::size_t count_ = 0;
  std::size_t head_ = 0;
};

// One half-space normal·x ≤ rhs of the localization set.
struct Cut {
  std::vector<double> normal;
  double rhs = 0.0;
  CutOrigin origin = CutOrigin::kOptimality;
  double weight = 1.0;
  int birth_iteration = 0;
  SlackHistory history;
};

// The region still known to contain the minimizer: a box plus accumulated
// cuts.  `witness` is a strictly interior point, maintained by the engine
// so centering always has a valid start.
struct LocalizationSet {
  Box box;
  std::vector<Cut> cuts;
  std::vector<double> witness;
};

enum class CutPolicy { kKeepAll, kDropRedundant, kAggregate, kWeighted };

enum class TerminationReason {
  kGapConverged,      // best value within tolerance of the model bound
  kMaxIterations,     // oracle-call budget exhausted
  kNullSubgradient,   // the oracle certified the query point optimal
  kIncoherentOracle,  // reply inconsistent with the query point
  kCriticalFailure,   // numerical breakdown; see diagnostic
};

struct TraceRecord {
  int iteration = 0;
  double best_value = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;
  std::size_t cut_count = 0;
  int newton_steps = 0;
  double condition_estimate = 1.0;
};

struct AccpmConfig {
  double gap_tolerance = 1e-6;  // relative: gap ≤ tol·max(1, |best|)
  int max_iterations = 0;       // 0 → 50·dim
  CutPolicy policy = CutPolicy::kKeepAll;
  std::size_t cut_budget = 0;   // 0 → unlimited
  bool incremental_factor = true;
  double coherence_tolerance = 1e-7;
};

struct AccpmResult {
  TerminationReason reason = TerminationReason::kCriticalFailure;
  std::vector<double> best_point;
  double best_value = 0.0;
  double lower_bound = 0.0;
  int iterations = 0;
  std::vector<TraceRecord> trace;
  std::string diagnostic;  // non-empty on critical failure
};

struct CenteringOptions {
  double decrement_tolerance = 1e-8;
  int max_steps = 200;
  // Factor of the barrier Hessian near the start point, if the caller has
  // one.  Used for the first direction only (with a line search); the
  // termination test never trusts it.
  const CholeskyFactor* warm_factor = nullptr;
};

struct CenterPoint {
  std::vector<double> x;
  std::vector<double> slacks;      // cuts first, then lo/hi faces per axis
  int newton_steps = 0;
  std::vector<double> decrements;  // per fresh-Hessian Newton step
  CholeskyFactor factor;           // barrier Hessian factor at x
};

// Damped Newton minimization of the weighted log barrier
//   Φ(x) = −Σᵢ wᵢ ln sᵢ(x)
// over the cuts and box faces (box faces carry weight 1).  x0 must be
// strictly interior.  Throws CenterNotFound when it is not, or when the
// step budget runs out.
CenterPoint analytic_center(const LocalizationSet& loc,
                            std::span<const double> x0,
                            const CenteringOptions& options = {});

// Barrier slacks at x, in the row order used throughout: cuts first, then
// lo/hi faces per axis.
std::vector<double> barrier_slacks(const LocalizationSet& loc,
                                   std::span<const double> x);

enum class CutOutcome { kAdded, kNullSubgradient, kIncoherent };

// Appends the cut an oracle reply induces at query point y.  An
// optimality reply (f, g) becomes g·x ≤ g·y; a feasibility half-space is
// taken as-is but must be coherent — its slack at y may not exceed
// `coherence_tol`, i.e. it has to cut y off (or at least touch it).
// A zero normal means kNullSubgradient for optimality replies (y is
// optimal) and kIncoherent for feasibility ones (no half-space at all).
CutOutcome add_cut(LocalizationSet& loc, const OracleReply& reply,
                   std::span<const double> y, int iteration,
                   double coherence_tol = 1e-7);

// One supporting plane of the objective model: f(z) ≥ value + gradient·(z−point).
struct ModelPlane {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> point;
};

// Minimum of the piecewise-linear model max_j plane_j(z) over the box,
// solved as an epigraph LP.  `upper_hint` caps the epigraph variable
// (any value known to be ≥ the model minimum works; best value + 1 is the
// usual choice).  Requires at least one plane.
double model_lower_bound(const std::vector<ModelPlane>& planes, const Box& box,
                         double upper_hint);

// Interior point of the localization set via a largest-margin LP over the
// normalized faces.  Returns nullopt when the interior is (numerically)
// empty.
std::optional<std::vector<double>> find_interior_point(
    const LocalizationSet& loc);

struct ManageOutcome {
  std::size_t dropped = 0;
  std::size_t aggregated = 0;   // cuts merged away into one
  std::size_t reweighted = 0;

  bool changed_geometry() const { return dropped + aggregated > 0; }
};

// Applies a cut-management policy at the current center; `slacks` are the
// raw cut slacks there (cut order).  Slack histories are updated as part
// of the call.  Removal-type policies never touch a cut whose normalized
// slack is within 1e-6 of active and never shrink the pool below dim+1
// cuts — except exact duplicates, whose removal provably changes nothing.
ManageOutcome manage_cuts(LocalizationSet& loc, CutPolicy policy,
                          std::size_t budget, std::span<const double> slacks,
                          int iteration);

// The full engine: center, query the oracle, cut, re-center, bound the
// gap with the accumulated model, manage the pool; repeats until one of
// the TerminationReason conditions fires.
AccpmResult accpm_solve(const Oracle& oracle, const Box& box,
                        const AccpmConfig& config = {});

}  // namespace oracular

#endif  // ORACULAR_ACCPM_HPP_
