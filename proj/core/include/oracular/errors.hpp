// SPDX-License-Identifier: Apache-2.0

#ifndef ORACULAR_ERRORS_HPP_
#define ORACULAR_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oracular {

// Thrown when two containers that must agree in size do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown by the Cholesky factorization when a pivot falls below the
// breakdown threshold.  `pivot_index` is the zero-based row at which the
// factorization stopped.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(std::size_t pivot_index, double pivot_value)
      : std::runtime_error("matrix is not positive definite (pivot " +
                           std::to_string(pivot_index) + " = " +
                           std::to_string(pivot_value) + ")"),
        pivot_index(pivot_index),
        pivot_value(pivot_value) {}

  std::size_t pivot_index;
  double pivot_value;
};

// Thrown by iterative schemes (mixed-precision refinement) that fail to
// reach their target accuracy within the step budget, or whose
// reduced-precision factorization breaks down.
class NoConvergence : public std::runtime_error {
 public:
  explicit NoConvergence(const std::string& what, double last_residual = 0.0)
      : std::runtime_error(what), last_residual(last_residual) {}

  double last_residual;
};

// Thrown by the simplex solver when the pivot budget is exhausted.
class IterationLimit : public std::runtime_error {
 public:
  explicit IterationLimit(long pivots)
      : std::runtime_error("simplex pivot budget exhausted after " +
                           std::to_string(pivots) + " pivots"),
        pivots(pivots) {}

  long pivots;
};

// Thrown when Newton iteration fails to reach an analytic center.
class CenterNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by first-order oracles that cannot evaluate at the query point.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by instance parsers; `line` is the 1-based input line at fault.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line(line) {}

  int line;
};

// Thrown by exhaustive reference solvers when the search space exceeds
// their hard enumeration cap.
class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oracular

#endif  // ORACULAR_ERRORS_HPP_
