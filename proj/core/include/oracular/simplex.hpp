// SPDX-License-Identifier: Apache-2.0

#ifndef ORACULAR_SIMPLEX_HPP_
#define ORACULAR_SIMPLEX_HPP_

#include <vector>

#include "oracular/model.hpp"

namespace oracular {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  // Structural variable values (empty unless optimal).
  std::vector<double> x;
  // Objective in the problem's original sense.
  double objective = 0.0;
  // One multiplier per row, for the original sense: at an optimum,
  // objective = Σᵢ dualsᵢ·rhsᵢ + contributions from active bounds.
  std::vector<double> duals;
  // Final basic column per row (internal ids: structural < slack < artificial).
  std::vector<int> basis;
  long pivots = 0;
  long degenerate_pivots = 0;
  bool used_bland = false;
};

// Two-phase primal simplex on the full tableau with bounded variables.
// Rows get a slack each (≤ → [0,∞), ≥ → (−∞,0], = → [0,0]) plus a phase-1
// artificial.  Nonbasic variables may sit at either bound; bound flips
// count as pivots.  Pricing is Dantzig (largest reduced cost, ties to the
// lowest column index) and switches to Bland's rule for good once the
// cumulative degenerate pivot count passes 3(n+m).  Ratio-test ties go to
// the row whose basic variable has the lowest index.
//
// The final basic values and duals are recomputed from the final basis by
// dense elimination, so tableau drift does not reach the reported result.
//
// Preconditions: problem validates cleanly and all variables are marked
// continuous (throws std::invalid_argument otherwise).  Throws
// IterationLimit after 50(n+m) pivots.
LpResult solve_lp(const MipProblem& problem, const Tolerances& tol = {});

}  // namespace oracular

#endif  // ORACULAR_SIMPLEX_HPP_
