// SPDX-License-Identifier: Apache-2.0

#include "oracular/accpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "oracular/errors.hpp"
#include "oracular/simplex.hpp"

namespace oracular {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kActiveSlack = 1e-6;    // normalized slack counting as active
constexpr double kHistoryFactor = 10.0;  // slack/median ratio that flags a cut
constexpr double kDuplicateTol = 1e-12;  // normalized duplicate comparison
constexpr double kMaxWeight = 100.0;
constexpr double kWeightBump = 1.5;
constexpr double kInteriorMargin = 1e-12;
// When the barrier is flat to machine resolution, the computed Newton
// decrement bottoms out at a rounding-noise floor that scales with the
// slack spread.  A stall below this decrement is convergence, not failure.
constexpr double kStallDecrement = 1e-4;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// The barrier's face list: cuts first, then lo/hi box faces per axis, all
// written as rows of a·x ≤ rhs.
struct BarrierRows {
  DenseMatrix a;
  std::vector<double> rhs;
  std::vector<double> weight;
};

BarrierRows build_rows(const LocalizationSet& loc) {
  const std::size_t n = loc.box.dim();
  const std::size_t rows = loc.cuts.size() + 2 * n;
  BarrierRows br{DenseMatrix(rows, n), std::vector<double>(rows),
                 std::vector<double>(rows, 1.0)};
  std::size_t r = 0;
  for (const Cut& cut : loc.cuts) {
    for (std::size_t j = 0; j < n; ++j) br.a(r, j) = cut.normal[j];
    br.rhs[r] = cut.rhs;
    br.weight[r] = cut.weight;
    ++r;
  }
  for (std::size_t k = 0; k < n; ++k) {
    br.a(r, k) = -1.0;  // lo face: −x_k ≤ −lo_k
    br.rhs[r] = -loc.box.lo[k];
    ++r;
    br.a(r, k) = 1.0;  // hi face: x_k ≤ hi_k
    br.rhs[r] = loc.box.hi[k];
    ++r;
  }
  return br;
}

}  // namespace

std::vector<double> Box::midpoint() const {
  std::vector<double> mid(lo.size());
  for (std::size_t k = 0; k < lo.size(); ++k) mid[k] = (lo[k] + hi[k]) / 2.0;
  return mid;
}

void SlackHistory::push(double ratio) {
  ratios_[head_] = ratio;
  head_ = (head_ + 1) % kWindow;
  if (count_ < kWindow) ++count_;
}

bool SlackHistory::all_above(double threshold) const {
  for (std::size_t i = 0; i < count_; ++i) {
    if (!(ratios_[i] > threshold)) return false;
  }
  return count_ > 0;
}

std::vector<double> barrier_slacks(const LocalizationSet& loc,
                                   std::span<const double> x) {
  const std::size_t n = loc.box.dim();
  if (x.size() != n) {
    throw DimensionMismatch("barrier_slacks: point has size " +
                            std::to_string(x.size()) + ", expected " +
                            std::to_string(n));
  }
  std::vector<double> s;
  s.reserve(loc.cuts.size() + 2 * n);
  for (const Cut& cut : loc.cuts) {
    s.push_back(cut.rhs - dot(cut.normal, x));
  }
  for (std::size_t k = 0; k < n; ++k) {
    s.push_back(x[k] - loc.box.lo[k]);
    s.push_back(loc.box.hi[k] - x[k]);
  }
  return s;
}

CenterPoint analytic_center(const LocalizationSet& loc,
                            std::span<const double> x0,
                            const CenteringOptions& options) {
  const std::size_t n = loc.box.dim();
  if (x0.size() != n) {
    throw DimensionMismatch("analytic_center: start point has size " +
                            std::to_string(x0.size()) + ", expected " +
                            std::to_string(n));
  }
  const BarrierRows rows = build_rows(loc);
  const std::size_t m = rows.rhs.size();

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> s(m);
  auto compute_slacks = [&](const std::vector<double>& pt,
                            std::vector<double>& out) {
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = rows.rhs[i] - dot(rows.a.row(i), pt);
      if (!(out[i] > 0.0)) return false;
    }
    return true;
  };
  if (!compute_slacks(x, s)) {
    throw CenterNotFound("analytic_center: start point is not strictly interior");
  }
  auto barrier = [&](const std::vector<double>& slacks) {
    double phi = 0.0;
    for (std::size_t i = 0; i < m; ++i) phi -= rows.weight[i] * std::log(slacks[i]);
    return phi;
  };

  CenterPoint out;
  double phi = barrier(s);
  std::vector<double> g(n);
  int steps = 0;
  bool try_warm = options.warm_factor != nullptr &&
                  options.warm_factor->dim() == n && !loc.cuts.empty();

  enum class Step { kMoved, kStalled, kFailed };

  // One damped Newton step with the given factor.  kStalled means the
  // barrier can no longer decrease measurably in this direction — at a
  // small decrement that is the floating-point floor of Φ, not a failure.
  auto try_step = [&](const CholeskyFactor& factor) {
    std::vector<double> d = solve(factor, g);
    const double slope = -dot(g, d);  // ∇Φ·(−H⁻¹∇Φ)
    if (!(slope < 0.0)) return Step::kFailed;
    for (double& v : d) v = -v;

    double alpha_max = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      const double ad = dot(rows.a.row(i), d);
      if (ad > 0.0) alpha_max = std::min(alpha_max, s[i] / ad);
    }
    double alpha = std::min(1.0, 0.995 * alpha_max);
    const double phi_resolution =
        16.0 * std::numeric_limits<double>::epsilon() *
        std::max(1.0, std::abs(phi));
    std::vector<double> xn(n), sn(m);
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t j = 0; j < n; ++j) xn[j] = x[j] + alpha * d[j];
      if (compute_slacks(xn, sn)) {
        const double phin = barrier(sn);
        if (phin <= phi + 0.25 * alpha * slope) {
          if (phin > phi - phi_resolution) return Step::kStalled;
          x.swap(xn);
          s.swap(sn);
          phi = phin;
          ++steps;
          return Step::kMoved;
        }
      }
      alpha *= 0.5;
    }
    return Step::kStalled;
  };

  while (true) {
    if (steps > options.max_steps) {
      throw CenterNotFound("analytic_center: no convergence within " +
                           std::to_string(options.max_steps) +
                           " Newton steps");
    }
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double c = rows.weight[i] / s[i];
      for (std::size_t j = 0; j < n; ++j) g[j] += c * rows.a(i, j);
    }

    if (try_warm) {
      // A factor from before the latest cut landed: good enough for one
      // guarded descent step, never for the termination test.
      try_warm = false;
      if (try_step(*options.warm_factor) == Step::kMoved) continue;
    }

    CholeskyFactor factor = cholesky(form_normal_matrix(rows.a, s, rows.weight));
    std::vector<double> hg = solve(factor, g);
    const double decrement = std::sqrt(std::max(dot(g, hg), 0.0));
    out.decrements.push_back(decrement);
    if (decrement <= options.decrement_tolerance) {
      out.x = std::move(x);
      out.slacks = std::move(s);
      out.newton_steps = steps;
      out.factor = std::move(factor);
      return out;
    }
    const Step step = try_step(factor);
    if (step == Step::kMoved) continue;
    // The computed decrement sits at the rounding noise floor once Φ is
    // flat to machine resolution; the current point is the center to
    // working accuracy.  A stall at a *large* decrement is a real failure.
    if (step == Step::kStalled && decrement <= kStallDecrement) {
      out.x = std::move(x);
      out.slacks = std::move(s);
      out.newton_steps = steps;
      out.factor = std::move(factor);
      return out;
    }
    throw CenterNotFound(
        "analytic_center: line search stalled at decrement " +
        std::to_string(decrement));
  }
}

CutOutcome add_cut(LocalizationSet& loc, const OracleReply& reply,
                   std::span<const double> y, int iteration,
                   double coherence_tol) {
  const std::size_t n = loc.box.dim();
  Cut cut;
  if (const auto* opt = std::get_if<OptimalityReply>(&reply)) {
    if (opt->subgradient.size() != n) {
      throw DimensionMismatch("add_cut: subgradient has size " +
                              std::to_string(opt->subgradient.size()) +
                              ", expected " + std::to_string(n));
    }
    bool zero = true;
    for (double v : opt->subgradient) {
      if (v != 0.0) {
        zero = false;
        break;
      }
    }
    if (zero) return CutOutcome::kNullSubgradient;
    cut.normal = opt->subgradient;
    cut.rhs = dot(opt->subgradient, y);
    cut.origin = CutOrigin::kOptimality;
  } else {
    const auto& feas = std::get<FeasibilityReply>(reply);
    if (feas.normal.size() != n) {
      throw DimensionMismatch("add_cut: cut normal has size " +
                              std::to_string(feas.normal.size()) +
                              ", expected " + std::to_string(n));
    }
    bool zero = true;
    for (double v : feas.normal) {
      if (v != 0.0) {
        zero = false;
        break;
      }
    }
    if (zero) return CutOutcome::kIncoherent;
    // Coherent means the half-space excludes (or touches) the query
    // point; positive slack would leave y strictly inside, which says
    // the oracle answered some other question.
    const double slack = feas.rhs - dot(feas.normal, y);
    if (slack > coherence_tol) return CutOutcome::kIncoherent;
    cut.normal = feas.normal;
    cut.rhs = feas.rhs;
    cut.origin = CutOrigin::kFeasibility;
  }
  cut.birth_iteration = iteration;
  loc.cuts.push_back(std::move(cut));
  return CutOutcome::kAdded;
}

double model_lower_bound(const std::vector<ModelPlane>& planes, const Box& box,
                         double upper_hint) {
  if (planes.empty()) {
    throw std::invalid_argument("model_lower_bound: no planes");
  }
  const std::size_t n = box.dim();

  MipProblem lp;
  lp.sense = Sense::kMinimize;
  lp.objective.assign(n + 1, 0.0);
  lp.objective[n] = 1.0;  // epigraph variable t
  lp.lower = box.lo;
  lp.upper = box.hi;

  // Finite bounds for t: every plane keeps t ≥ its own minimum over the
  // box, and the caller guarantees the model minimum is ≤ upper_hint.
  double t_lo = -kInf;
  for (const ModelPlane& plane : planes) {
    double low = plane.value - dot(plane.gradient, plane.point);
    for (std::size_t k = 0; k < n; ++k) {
      low += std::min(plane.gradient[k] * box.lo[k],
                      plane.gradient[k] * box.hi[k]);
    }
    t_lo = std::max(t_lo, low);
  }
  t_lo = std::min(t_lo, upper_hint);  // guard rounding inversions
  lp.lower.push_back(t_lo);
  lp.upper.push_back(upper_hint);
  lp.kind.assign(n + 1, VarKind::kContinuous);

  for (const ModelPlane& plane : planes) {
    LinearConstraint row;  // g·z − t ≤ g·y − f
    row.coefficients.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) row.coefficients[k] = plane.gradient[k];
    row.coefficients[n] = -1.0;
    row.relation = Relation::kLessEqual;
    row.rhs = dot(plane.gradient, plane.point) - plane.value;
    lp.constraints.push_back(std::move(row));
  }

  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::kOptimal) {
    throw std::runtime_error("model_lower_bound: epigraph LP did not solve");
  }
  return r.objective;
}

std::optional<std::vector<double>> find_interior_point(
    const LocalizationSet& loc) {
  const std::size_t n = loc.box.dim();

  // Largest-margin program over normalized faces: maximize δ subject to
  // â·z + δ ≤ b̂ for every cut and box face.
  MipProblem lp;
  lp.sense = Sense::kMaximize;
  lp.objective.assign(n + 1, 0.0);
  lp.objective[n] = 1.0;
  lp.lower = loc.box.lo;
  lp.upper = loc.box.hi;
  double delta_cap = kInf;
  for (std::size_t k = 0; k < n; ++k) {
    delta_cap = std::min(delta_cap, (loc.box.hi[k] - loc.box.lo[k]) / 2.0);
  }
  lp.lower.push_back(0.0);
  lp.upper.push_back(delta_cap);
  lp.kind.assign(n + 1, VarKind::kContinuous);

  for (const Cut& cut : loc.cuts) {
    const double scale = norm2(cut.normal);
    LinearConstraint row;
    row.coefficients.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      row.coefficients[k] = cut.normal[k] / scale;
    }
    row.coefficients[n] = 1.0;
    row.relation = Relation::kLessEqual;
    row.rhs = cut.rhs / scale;
    lp.constraints.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < n; ++k) {
    LinearConstraint hi_row;  // z_k + δ ≤ hi_k
    hi_row.coefficients.assign(n + 1, 0.0);
    hi_row.coefficients[k] = 1.0;
    hi_row.coefficients[n] = 1.0;
    hi_row.relation = Relation::kLessEqual;
    hi_row.rhs = loc.box.hi[k];
    lp.constraints.push_back(std::move(hi_row));

    LinearConstraint lo_row;  // −z_k + δ ≤ −lo_k
    lo_row.coefficients.assign(n + 1, 0.0);
    lo_row.coefficients[k] = -1.0;
    lo_row.coefficients[n] = 1.0;
    lo_row.relation = Relation::kLessEqual;
    lo_row.rhs = -loc.box.lo[k];
    lp.constraints.push_back(std::move(lo_row));
  }

  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::kOptimal || r.objective <= kInteriorMargin) {
    return std::nullopt;
  }
  return std::vector<double>(r.x.begin(), r.x.begin() + static_cast<long>(n));
}

namespace {

bool duplicate_cuts(const Cut& a, const Cut& b) {
  const double na = norm2(a.normal), nb = norm2(b.normal);
  if (std::abs(a.rhs / na - b.rhs / nb) > kDuplicateTol) return false;
  for (std::size_t k = 0; k < a.normal.size(); ++k) {
    if (std::abs(a.normal[k] / na - b.normal[k] / nb) > kDuplicateTol) {
      return false;
    }
  }
  return true;
}

void erase_cuts(std::vector<Cut>& cuts, const std::vector<char>& remove) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!remove[i]) {
      if (w != i) cuts[w] = std::move(cuts[i]);
      ++w;
    }
  }
  cuts.resize(w);
}

}  // namespace

ManageOutcome manage_cuts(LocalizationSet& loc, CutPolicy policy,
                          std::size_t budget, std::span<const double> slacks,
                          int iteration) {
  ManageOutcome out;
  if (policy == CutPolicy::kKeepAll || loc.cuts.empty()) return out;
  if (slacks.size() != loc.cuts.size()) {
    throw DimensionMismatch("manage_cuts: slack count " +
                            std::to_string(slacks.size()) +
                            " does not match cut count " +
                            std::to_string(loc.cuts.size()));
  }

  const std::size_t n = loc.box.dim();
  const std::size_t floor_count = n + 1;

  std::vector<double> ns(loc.cuts.size());
  for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
    ns[i] = slacks[i] / norm2(loc.cuts[i].normal);
  }

  // Exact duplicates never carry information; removing the later copy is
  // free of the usual protections because the polyhedron cannot change.
  if (policy == CutPolicy::kDropRedundant && loc.cuts.size() > 1) {
    std::vector<char> dup(loc.cuts.size(), 0);
    for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
      if (dup[i]) continue;
      for (std::size_t j = i + 1; j < loc.cuts.size(); ++j) {
        if (!dup[j] && duplicate_cuts(loc.cuts[i], loc.cuts[j])) dup[j] = 1;
      }
    }
    std::size_t removed = 0;
    for (char d : dup) removed += d;
    if (removed > 0) {
      erase_cuts(loc.cuts, dup);
      std::vector<double> ns_kept;
      for (std::size_t i = 0; i < dup.size(); ++i) {
        if (!dup[i]) ns_kept.push_back(ns[i]);
      }
      ns = std::move(ns_kept);
      out.dropped += removed;
    }
  }
  if (loc.cuts.empty()) return out;

  std::vector<double> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double median =
      (sorted.size() % 2 == 1)
          ? sorted[mid]
          : 0.5 * (sorted[mid - 1] + sorted[mid]);

  for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
    loc.cuts[i].history.push(ns[i] / std::max(median, 1e-300));
  }

  if (policy == CutPolicy::kWeighted) {
    for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
      if (ns[i] < median) {
        loc.cuts[i].weight =
            std::min(loc.cuts[i].weight * kWeightBump, kMaxWeight);
        ++out.reweighted;
      }
    }
    return out;
  }

  // Selection for removal: history-flagged cuts plus, under a budget,
  // whatever least-binding cuts it takes to get back under it.
  std::vector<char> selected(loc.cuts.size(), 0);
  std::size_t selected_count = 0;
  for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
    if (ns[i] > kActiveSlack && loc.cuts[i].history.full() &&
        loc.cuts[i].history.all_above(kHistoryFactor)) {
      selected[i] = 1;
      ++selected_count;
    }
  }
  if (budget > 0 && loc.cuts.size() > budget) {
    const std::size_t excess = loc.cuts.size() - budget;
    if (excess > selected_count) {
      std::vector<std::size_t> order(loc.cuts.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return ns[a] > ns[b]; });
      for (std::size_t idx : order) {
        if (selected_count >= excess) break;
        if (selected[idx] || ns[idx] <= kActiveSlack) continue;
        selected[idx] = 1;
        ++selected_count;
      }
    }
  }

  // Never let removals push the pool below dim+1 cuts: unselect the
  // least-slack (most binding) picks first.
  const std::size_t max_removable =
      loc.cuts.size() > floor_count ? loc.cuts.size() - floor_count : 0;
  if (selected_count > max_removable) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
      if (selected[i]) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ns[a] < ns[b]; });
    for (std::size_t idx : order) {
      if (selected_count <= max_removable) break;
      selected[idx] = 0;
      --selected_count;
    }
  }
  if (selected_count == 0) return out;

  if (policy == CutPolicy::kDropRedundant || selected_count == 1) {
    erase_cuts(loc.cuts, selected);
    out.dropped += selected_count;
    return out;
  }

  // Aggregate: replace the selected cuts by their slack-weighted convex
  // combination (valid because any convex combination of valid ≤-rows is
  // again valid).
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
    if (selected[i]) weight_sum += ns[i];
  }
  Cut combo;
  combo.normal.assign(n, 0.0);
  combo.origin = CutOrigin::kAggregate;
  combo.birth_iteration = iteration;
  for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
    if (!selected[i]) continue;
    const double alpha = weight_sum > 0.0
                             ? ns[i] / weight_sum
                             : 1.0 / static_cast<double>(selected_count);
    for (std::size_t k = 0; k < n; ++k) {
      combo.normal[k] += alpha * loc.cuts[i].normal[k];
    }
    combo.rhs += alpha * loc.cuts[i].rhs;
  }
  erase_cuts(loc.cuts, selected);
  if (norm2(combo.normal) > 1e-12) {
    loc.cuts.push_back(std::move(combo));
    out.aggregated += selected_count;
  } else {
    out.dropped += selected_count;  // combination degenerated; just drop
  }
  return out;
}

AccpmResult accpm_solve(const Oracle& oracle, const Box& box,
                        const AccpmConfig& config) {
  const std::size_t n = box.dim();
  if (box.hi.size() != n || n == 0) {
    throw std::invalid_argument("accpm_solve: malformed box");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(box.lo[k]) || !std::isfinite(box.hi[k]) ||
        !(box.lo[k] < box.hi[k])) {
      throw std::invalid_argument(
          "accpm_solve: box must have finite lo < hi on every axis");
    }
  }
  if (oracle.dim() != n) {
    throw std::invalid_argument("accpm_solve: oracle dimension " +
                                std::to_string(oracle.dim()) +
                                " does not match box dimension " +
                                std::to_string(n));
  }

  AccpmConfig cfg = config;
  if (cfg.max_iterations <= 0) {
    cfg.max_iterations = 50 * static_cast<int>(n);
  }

  AccpmResult res;
  res.best_value = kInf;
  res.lower_bound = -kInf;

  LocalizationSet loc;
  loc.box = box;
  loc.witness = box.midpoint();

  std::vector<ModelPlane> planes;
  CholeskyFactor warm;
  bool have_warm = false;

  auto push_trace = [&](int iteration, const CenterPoint* center) {
    TraceRecord t;
    t.iteration = iteration;
    t.best_value = res.best_value;
    t.lower_bound = res.lower_bound;
    t.gap = res.best_value - res.lower_bound;
    t.cut_count = loc.cuts.size();
    if (center != nullptr) {
      t.newton_steps = center->newton_steps;
      t.condition_estimate = condition_estimate(center->factor);
    }
    res.trace.push_back(t);
  };

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    res.iterations = iter;

    CenterPoint center;
    try {
      CenteringOptions copt;
      copt.warm_factor = have_warm ? &warm : nullptr;
      center = analytic_center(loc, loc.witness, copt);
    } catch (const std::exception& e) {
      res.reason = TerminationReason::kCriticalFailure;
      res.diagnostic = std::string("centering failed: ") + e.what();
      push_trace(iter, nullptr);
      return res;
    }

    OracleReply reply;
    try {
      reply = oracle.query(center.x);
    } catch (const std::exception& e) {
      res.reason = TerminationReason::kCriticalFailure;
      res.diagnostic = std::string("oracle failed: ") + e.what();
      push_trace(iter, &center);
      return res;
    }

    double reply_value = kInf;
    bool coherent_values = true;
    if (const auto* opt = std::get_if<OptimalityReply>(&reply)) {
      coherent_values =
          std::isfinite(opt->value) && all_finite(opt->subgradient);
      if (coherent_values) {
        reply_value = opt->value;
        if (reply_value < res.best_value) {
          res.best_value = reply_value;
          res.best_point = center.x;
        }
      }
    } else {
      const auto& feas = std::get<FeasibilityReply>(reply);
      coherent_values = std::isfinite(feas.rhs) && all_finite(feas.normal);
    }
    if (!coherent_values) {
      res.reason = TerminationReason::kIncoherentOracle;
      res.diagnostic = "oracle reply contains non-finite values";
      push_trace(iter, &center);
      return res;
    }

    const CutOutcome outcome =
        add_cut(loc, reply, center.x, iter, cfg.coherence_tolerance);
    if (outcome == CutOutcome::kNullSubgradient) {
      // A null subgradient certifies the center as a minimizer.
      res.lower_bound = std::max(res.lower_bound, reply_value);
      res.reason = TerminationReason::kNullSubgradient;
      push_trace(iter, &center);
      return res;
    }
    if (outcome == CutOutcome::kIncoherent) {
      res.reason = TerminationReason::kIncoherentOracle;
      res.diagnostic =
          "oracle returned a cut that does not exclude the query point";
      push_trace(iter, &center);
      return res;
    }

    if (const auto* opt = std::get_if<OptimalityReply>(&reply)) {
      planes.push_back({opt->value, opt->subgradient,
                        std::vector<double>(center.x.begin(), center.x.end())});
    }

    // Re-anchor the witness strictly inside the tightened set: step away
    // from the new cut along the barrier metric.  Optimality cuts pass
    // through the center, so t = 1/2 always lands inside (weights ≥ 1);
    // deep feasibility cuts may need the margin LP fallback.
    const Cut& newest = loc.cuts.back();
    bool restored = false;
    std::vector<double> hd = solve(center.factor, newest.normal);
    const double gamma2 = dot(newest.normal, hd);
    if (gamma2 > 0.0) {
      const double gamma = std::sqrt(gamma2);
      for (const double t : {0.5, 0.9, 0.99}) {
        std::vector<double> cand(n);
        for (std::size_t k = 0; k < n; ++k) {
          cand[k] = center.x[k] - (t / gamma) * hd[k];
        }
        if (!all_finite(cand)) continue;
        const std::vector<double> cs = barrier_slacks(loc, cand);
        bool interior = true;
        for (double sv : cs) {
          if (!(sv > 0.0)) {
            interior = false;
            break;
          }
        }
        if (!interior) continue;
        loc.witness = std::move(cand);
        restored = true;
        if (cfg.incremental_factor) {
          const double s_new = newest.rhs - dot(newest.normal, loc.witness);
          warm = rank_one_update(center.factor, newest.normal,
                                 newest.weight / (s_new * s_new));
          have_warm = true;
        } else {
          have_warm = false;
        }
        break;
      }
    }
    if (!restored) {
      const auto interior = find_interior_point(loc);
      if (!interior.has_value()) {
        res.reason = TerminationReason::kCriticalFailure;
        res.diagnostic = "localization set has an empty interior";
        push_trace(iter, &center);
        return res;
      }
      loc.witness = *interior;
      have_warm = false;
    }

    if (!planes.empty() && res.best_value < kInf) {
      try {
        const double mlb =
            model_lower_bound(planes, box, res.best_value + 1.0);
        res.lower_bound = std::max(res.lower_bound, mlb);
      } catch (const std::exception& e) {
        res.reason = TerminationReason::kCriticalFailure;
        res.diagnostic = std::string("lower-bound LP failed: ") + e.what();
        push_trace(iter, &center);
        return res;
      }
    }

    push_trace(iter, &center);

    if (res.best_value < kInf && res.lower_bound > -kInf) {
      const double gap = res.best_value - res.lower_bound;
      if (gap <= cfg.gap_tolerance * std::max(1.0, std::abs(res.best_value))) {
        res.reason = TerminationReason::kGapConverged;
        return res;
      }
    }

    if (cfg.policy != CutPolicy::kKeepAll) {
      std::vector<double> cut_slacks(loc.cuts.size());
      for (std::size_t i = 0; i < loc.cuts.size(); ++i) {
        cut_slacks[i] = loc.cuts[i].rhs - dot(loc.cuts[i].normal, center.x);
      }
      const ManageOutcome mo =
          manage_cuts(loc, cfg.policy, cfg.cut_budget, cut_slacks, iter);
      if (mo.changed_geometry()) {
        have_warm = false;  // the factor no longer matches the face list
      }
    }
  }

  res.reason = TerminationReason::kMaxIterations;
  return res;
}

}  // namespace oracular
