// SPDX-License-Identifier: Apache-2.0

#ifndef ORACULAR_MODEL_HPP_
#define ORACULAR_MODEL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace oracular {

enum class Sense { kMinimize, kMaximize };

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

enum class VarKind { kContinuous, kInteger, kBinary };

enum class SolStatus { kOptimal, kFeasible, kInfeasible, kUnbounded, kGapLimit };

// Shared numeric tolerances.  Feasibility is absolute on constraint
// violation; integrality is the distance to the nearest integer.
struct Tolerances {
  double feasibility = 1e-7;
  double integrality = 1e-6;
};

// One dense linear row: coefficients · x  (relation)  rhs.
struct LinearConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// A mixed-integer program over dense rows.  Bounds may be +/-infinity for
// continuous variables; integer and binary marks require finite bounds.
struct MipProblem {
  Sense sense = Sense::kMinimize;
  std::vector<double> objective;
  std::vector<LinearConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VarKind> kind;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_constraints() const { return constraints.size(); }
};

struct Solution {
  SolStatus status = SolStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Result of checking a point against a problem.
struct Evaluation {
  double objective = 0.0;
  // Largest violation over rows and bounds; 0 when feasible.  A row
  // a·x <= b contributes max(0, a·x - b), an equality |a·x - b|, and a
  // bound the amount by which it is crossed.
  double max_violation = 0.0;
  // True when every integer/binary variable is within the integrality
  // tolerance of an integer.
  bool integral = true;
};

// Structural validation.  Returns one human-readable diagnostic per
// violated invariant (empty means the problem is well formed).  Checked:
// matching sizes, finite objective and rhs entries, lower <= upper,
// binary bounds within [0, 1], finite bounds on integer variables.
std::vector<std::string> validate(const MipProblem& problem);

// Drops integrality: integer and binary marks become continuous; binary
// bounds are clamped into [0, 1].
MipProblem relax(const MipProblem& problem);

// Objective, worst violation and integrality of `x`.  Throws
// DimensionMismatch when x.size() != problem.num_vars().
Evaluation evaluate(const MipProblem& problem, std::span<const double> x,
                    const Tolerances& tol = {});

}  // namespace oracular

#endif  // ORACULAR_MODEL_HPP_
