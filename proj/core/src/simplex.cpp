// SPDX-License-Identifier: Apache-2.0

#include "oracular/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracular/errors.hpp"

namespace oracular {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPriceTol = 1e-9;  // reduced-cost eligibility (scaled)
constexpr double kPivotTol = 1e-11; // tableau entries below this don't pivot
constexpr double kDegenTol = 1e-9;  // steps below this count as degenerate
constexpr double kRatioTie = 1e-12; // ratio-test tie window

enum class ColState : unsigned char { kBasic, kAtLower, kAtUpper, kFreeZero };

// Solves a·x = rhs by Gaussian elimination with partial pivoting (a is
// row-major n×n, consumed).  Returns false on a singular matrix.
bool gauss_solve(std::vector<double> a, std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < 1e-300) return false;
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) {
        std::swap(a[k * n + j], a[piv * n + j]);
      }
      std::swap(rhs[k], rhs[piv]);
    }
    const double akk = a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / akk;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i * n + j] -= f * a[k * n + j];
      }
      rhs[i] -= f * rhs[k];
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii * n + j] * rhs[j];
    rhs[ii] = s / a[ii * n + ii];
  }
  return true;
}

class BoundedSimplex {
 public:
  BoundedSimplex(const MipProblem& problem, const Tolerances& tol)
      : tol_(tol) {
    n_ = problem.num_vars();
    m_ = problem.num_constraints();
    ncols_ = n_ + 2 * m_;
    sense_sign_ = (problem.sense == Sense::kMaximize) ? -1.0 : 1.0;
    cost_original_ = problem.objective;

    for (std::size_t j = 0; j < n_; ++j) {
      if (problem.kind[j] != VarKind::kContinuous) {
        throw std::invalid_argument(
            "solve_lp: variable " + std::to_string(j) +
            " is not continuous; relax the problem first");
      }
    }

    arows_.assign(m_ * n_, 0.0);
    b_.resize(m_);
    lo_.assign(ncols_, 0.0);
    hi_.assign(ncols_, 0.0);
    art_sign_.assign(m_, 1.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = problem.lower[j];
      hi_[j] = problem.upper[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const LinearConstraint& row = problem.constraints[i];
      if (row.coefficients.size() != n_) {
        throw DimensionMismatch("solve_lp: row " + std::to_string(i) +
                                " has wrong coefficient count");
      }
      for (std::size_t j = 0; j < n_; ++j) arows_[i * n_ + j] = row.coefficients[j];
      b_[i] = row.rhs;
      const std::size_t s = n_ + i;
      switch (row.relation) {
        case Relation::kLessEqual:
          lo_[s] = 0.0;
          hi_[s] = kInf;
          break;
        case Relation::kGreaterEqual:
          lo_[s] = -kInf;
          hi_[s] = 0.0;
          break;
        case Relation::kEqual:
          lo_[s] = 0.0;
          hi_[s] = 0.0;
          break;
      }
      // Artificial bounds are set per row during setup.
      lo_[n_ + m_ + i] = 0.0;
      hi_[n_ + m_ + i] = 0.0;
    }

    pivot_budget_ = 50 * static_cast<long>(n_ + m_);
    bland_after_ = 3 * static_cast<long>(n_ + m_);
  }

  LpResult run() {
    setup();
    phase1_ = true;
    set_phase_costs();
    rebuild_reduced_costs();
    const bool feasible = iterate();
    if (!feasible) {
      LpResult out;
      out.status = LpStatus::kInfeasible;
      out.pivots = pivots_;
      out.degenerate_pivots = degen_;
      out.used_bland = use_bland_;
      return out;
    }

    phase1_ = false;
    // Lock every artificial; nonbasic ones can never re-enter, basic
    // ones are pinned at zero by their bounds from here on.
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t aj = n_ + m_ + i;
      lo_[aj] = 0.0;
      hi_[aj] = 0.0;
      if (state_[aj] != ColState::kBasic) state_[aj] = ColState::kAtLower;
    }
    set_phase_costs();
    rebuild_reduced_costs();
    iterate();  // phase 2 cannot be infeasible; unbounded sets the flag
    if (unbounded_) {
      LpResult out;
      out.status = LpStatus::kUnbounded;
      out.pivots = pivots_;
      out.degenerate_pivots = degen_;
      out.used_bland = use_bland_;
      return out;
    }
    return finish();
  }

 private:
  void setup() {
    tab_.assign(m_ * ncols_, 0.0);
    beta_.assign(m_, 0.0);
    basis_.assign(m_, -1);
    row_of_.assign(ncols_, -1);
    state_.assign(ncols_, ColState::kAtLower);

    for (std::size_t j = 0; j < n_; ++j) {
      if (lo_[j] > -kInf) {
        state_[j] = ColState::kAtLower;
      } else if (hi_[j] < kInf) {
        state_[j] = ColState::kAtUpper;
      } else {
        state_[j] = ColState::kFreeZero;
      }
    }

    for (std::size_t i = 0; i < m_; ++i) {
      double residual = b_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        residual -= arows_[i * n_ + j] * nonbasic_value(j);
      }
      const std::size_t sj = n_ + i;
      const std::size_t aj = n_ + m_ + i;
      const bool slack_fits = residual >= lo_[sj] && residual <= hi_[sj];
      double row_scale = 1.0;
      if (slack_fits) {
        basis_[i] = static_cast<int>(sj);
        row_of_[sj] = static_cast<int>(i);
        state_[sj] = ColState::kBasic;
        beta_[i] = residual;
        state_[aj] = ColState::kAtLower;  // stays locked at [0, 0]
      } else {
        const double sign = (residual >= 0.0) ? 1.0 : -1.0;
        art_sign_[i] = sign;
        lo_[aj] = 0.0;
        hi_[aj] = kInf;  // live during phase 1
        basis_[i] = static_cast<int>(aj);
        row_of_[aj] = static_cast<int>(i);
        state_[aj] = ColState::kBasic;
        beta_[i] = std::abs(residual);
        state_[sj] = (lo_[sj] > -kInf) ? ColState::kAtLower : ColState::kAtUpper;
        row_scale = sign;  // makes the artificial column +e_i in the tableau
      }
      for (std::size_t j = 0; j < n_; ++j) {
        tab_[i * ncols_ + j] = row_scale * arows_[i * n_ + j];
      }
      tab_[i * ncols_ + sj] = row_scale;
      tab_[i * ncols_ + aj] = row_scale * art_sign_[i];
    }
  }

  double nonbasic_value(std::size_t j) const {
    switch (state_[j]) {
      case ColState::kAtLower:
        return lo_[j];
      case ColState::kAtUpper:
        return hi_[j];
      default:
        return 0.0;
    }
  }

  double column_value(std::size_t j) const {
    return state_[j] == ColState::kBasic ? beta_[row_of_[j]]
                                         : nonbasic_value(j);
  }

  void set_phase_costs() {
    cost_.assign(ncols_, 0.0);
    if (phase1_) {
      for (std::size_t i = 0; i < m_; ++i) cost_[n_ + m_ + i] = 1.0;
    } else {
      for (std::size_t j = 0; j < n_; ++j) {
        cost_[j] = sense_sign_ * cost_original_[j];
      }
    }
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
    price_tol_ = kPriceTol * (1.0 + max_cost);
  }

  void rebuild_reduced_costs() {
    dvec_ = cost_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* trow = &tab_[i * ncols_];
      for (std::size_t j = 0; j < ncols_; ++j) dvec_[j] -= cb * trow[j];
    }
    for (std::size_t i = 0; i < m_; ++i) dvec_[basis_[i]] = 0.0;
  }

  // Returns the entering column and its direction, or -1 when none price.
  int price(int* direction) const {
    int best = -1;
    double best_score = price_tol_;
    int best_dir = 0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (state_[j] == ColState::kBasic) continue;
      if (hi_[j] - lo_[j] <= 0.0 && state_[j] != ColState::kFreeZero) continue;
      const double d = dvec_[j];
      int dir = 0;
      if (state_[j] == ColState::kAtLower && d < -price_tol_) {
        dir = 1;
      } else if (state_[j] == ColState::kAtUpper && d > price_tol_) {
        dir = -1;
      } else if (state_[j] == ColState::kFreeZero &&
                 std::abs(d) > price_tol_) {
        dir = (d > 0.0) ? -1 : 1;
      }
      if (dir == 0) continue;
      if (use_bland_) {
        *direction = dir;
        return static_cast<int>(j);
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = static_cast<int>(j);
        best_dir = dir;
      }
    }
    *direction = best_dir;
    return best;
  }

  // Runs pivots until the current phase prices out.  Returns false when
  // phase 1 ends infeasible (phase 2 always returns true; unboundedness
  // sets unbounded_).
  bool iterate() {
    int rebuilds = 0;
    while (true) {
      if (!use_bland_ && degen_ > bland_after_) use_bland_ = true;
      int dir = 0;
      const int enter = price(&dir);
      if (enter < 0) {
        // Claimed optimal: rebuild the reduced costs from scratch once to
        // shed accumulated pivot drift, and only then accept the claim.
        if (rebuilds < 2) {
          ++rebuilds;
          rebuild_reduced_costs();
          int dir2 = 0;
          if (price(&dir2) >= 0) continue;
        }
        break;
      }

      if (++pivots_ > pivot_budget_) throw IterationLimit(pivots_);

      const std::size_t e = static_cast<std::size_t>(enter);
      const double step_range = hi_[e] - lo_[e];  // inf for free columns
      double best_t = step_range;
      int leave_row = -1;
      for (std::size_t i = 0; i < m_; ++i) {
        const double y = dir * tab_[i * ncols_ + e];
        double t = kInf;
        if (y > kPivotTol) {
          const double bl = lo_[basis_[i]];
          if (bl > -kInf) t = (beta_[i] - bl) / y;
        } else if (y < -kPivotTol) {
          const double bu = hi_[basis_[i]];
          if (bu < kInf) t = (bu - beta_[i]) / (-y);
        }
        if (t == kInf) continue;
        t = std::max(t, 0.0);
        if (t < best_t - kRatioTie) {
          best_t = t;
          leave_row = static_cast<int>(i);
        } else if (t <= best_t + kRatioTie && leave_row >= 0 &&
                   basis_[i] < basis_[leave_row]) {
          leave_row = static_cast<int>(i);
        }
      }

      if (leave_row < 0 && !(best_t < kInf)) {
        if (phase1_) {
          throw std::runtime_error(
              "solve_lp: phase-1 objective unbounded (numerical breakdown)");
        }
        unbounded_ = true;
        return true;
      }

      if (best_t <= kDegenTol) ++degen_;

      if (leave_row < 0) {
        // The entering column hits its opposite bound first: bound flip.
        for (std::size_t i = 0; i < m_; ++i) {
          beta_[i] -= best_t * dir * tab_[i * ncols_ + e];
        }
        state_[e] = (dir > 0) ? ColState::kAtUpper : ColState::kAtLower;
        continue;
      }

      pivot(static_cast<std::size_t>(leave_row), e, dir, best_t);
    }

    if (phase1_) {
      recompute_basics();
      double art_sum = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= static_cast<int>(n_ + m_)) art_sum += beta_[i];
      }
      double bmax = 0.0;
      for (double v : b_) bmax = std::max(bmax, std::abs(v));
      if (art_sum > tol_.feasibility * (1.0 + bmax)) return false;
    }
    return true;
  }

  void pivot(std::size_t r, std::size_t e, int dir, double t) {
    const double enter_new = column_value(e) + dir * t;
    for (std::size_t i = 0; i < m_; ++i) {
      beta_[i] -= t * dir * tab_[i * ncols_ + e];
    }
    const int leave = basis_[r];
    const double y_r = dir * tab_[r * ncols_ + e];
    state_[leave] = (y_r > 0.0) ? ColState::kAtLower : ColState::kAtUpper;
    row_of_[leave] = -1;
    // An artificial never comes back once it leaves the basis.
    if (leave >= static_cast<int>(n_ + m_)) {
      lo_[leave] = 0.0;
      hi_[leave] = 0.0;
      state_[leave] = ColState::kAtLower;
    }

    basis_[r] = static_cast<int>(e);
    row_of_[e] = static_cast<int>(r);
    state_[e] = ColState::kBasic;
    beta_[r] = enter_new;

    double* prow = &tab_[r * ncols_];
    const double piv = prow[e];
    for (std::size_t j = 0; j < ncols_; ++j) prow[j] /= piv;
    prow[e] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = tab_[i * ncols_ + e];
      if (f == 0.0) continue;
      double* irow = &tab_[i * ncols_];
      for (std::size_t j = 0; j < ncols_; ++j) irow[j] -= f * prow[j];
      irow[e] = 0.0;
    }
    const double fd = dvec_[e];
    if (fd != 0.0) {
      for (std::size_t j = 0; j < ncols_; ++j) dvec_[j] -= fd * prow[j];
    }
    dvec_[e] = 0.0;
  }

  // Original column j of the internal equality system (structural, slack
  // or artificial).
  void original_column(int j, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (j < static_cast<int>(n_)) {
      for (std::size_t i = 0; i < m_; ++i) out[i] = arows_[i * n_ + j];
    } else if (j < static_cast<int>(n_ + m_)) {
      out[j - n_] = 1.0;
    } else {
      out[j - n_ - m_] = art_sign_[j - n_ - m_];
    }
  }

  // Re-derives the basic values from the final basis by dense elimination,
  // so the reported point does not inherit tableau drift.
  void recompute_basics() {
    if (m_ == 0) return;
    std::vector<double> bmat(m_ * m_, 0.0);
    std::vector<double> col(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      original_column(basis_[k], col);
      for (std::size_t i = 0; i < m_; ++i) bmat[i * m_ + k] = col[i];
    }
    std::vector<double> rhs = b_;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (state_[j] == ColState::kBasic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      original_column(static_cast<int>(j), col);
      for (std::size_t i = 0; i < m_; ++i) rhs[i] -= col[i] * v;
    }
    if (gauss_solve(std::move(bmat), rhs)) beta_ = rhs;
  }

  LpResult finish() {
    recompute_basics();
    LpResult out;
    out.status = LpStatus::kOptimal;
    out.x.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) out.x[j] = column_value(j);
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      out.objective += cost_original_[j] * out.x[j];
    }
    out.duals = compute_duals();
    out.basis = basis_;
    out.pivots = pivots_;
    out.degenerate_pivots = degen_;
    out.used_bland = use_bland_;
    return out;
  }

  std::vector<double> compute_duals() {
    if (m_ == 0) return {};
    std::vector<double> bt(m_ * m_, 0.0);
    std::vector<double> col(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      original_column(basis_[k], col);
      for (std::size_t i = 0; i < m_; ++i) bt[k * m_ + i] = col[i];  // Bᵀ
    }
    std::vector<double> rhs(m_);
    for (std::size_t k = 0; k < m_; ++k) rhs[k] = cost_[basis_[k]];
    if (!gauss_solve(std::move(bt), rhs)) return std::vector<double>(m_, 0.0);
    // Internal costs carry the min-form sign; undo it for the caller.
    for (double& v : rhs) v *= sense_sign_;
    return rhs;
  }

  Tolerances tol_;
  std::size_t n_ = 0, m_ = 0, ncols_ = 0;
  double sense_sign_ = 1.0;
  std::vector<double> cost_original_;
  std::vector<double> arows_;
  std::vector<double> b_;
  std::vector<double> lo_, hi_;
  std::vector<double> art_sign_;
  std::vector<double> cost_;
  std::vector<double> tab_;
  std::vector<double> beta_;
  std::vector<double> dvec_;
  std::vector<int> basis_;
  std::vector<int> row_of_;
  std::vector<ColState> state_;
  double price_tol_ = kPriceTol;
  long pivot_budget_ = 0;
  long bland_after_ = 0;
  long pivots_ = 0;
  long degen_ = 0;
  bool phase1_ = true;
  bool use_bland_ = false;
  bool unbounded_ = false;
};

}  // namespace

LpResult solve_lp(const MipProblem& problem, const Tolerances& tol) {
  BoundedSimplex solver(problem, tol);
  return solver.run();
}

}  // namespace oracular
