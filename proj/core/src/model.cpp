// SPDX-License-Identifier: Apache-2.0

#include "oracular/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracular/errors.hpp"

namespace oracular {

namespace {

bool is_finite(double v) { return std::isfinite(v); }

std::string row_label(std::size_t i) { return "row " + std::to_string(i); }

std::string var_label(std::size_t j) { return "variable " + std::to_string(j); }

}  // namespace

std::vector<std::string> validate(const MipProblem& problem) {
  std::vector<std::string> diagnostics;
  const std::size_t n = problem.num_vars();

  auto check_size = [&](std::size_t got, const char* what) {
    if (got != n) {
      diagnostics.push_back(std::string(what) + " has size " +
                            std::to_string(got) + ", expected " +
                            std::to_string(n));
    }
  };
  check_size(problem.lower.size(), "lower bound vector");
  check_size(problem.upper.size(), "upper bound vector");
  check_size(problem.kind.size(), "variable kind vector");

  for (std::size_t j = 0; j < problem.objective.size(); ++j) {
    if (!is_finite(problem.objective[j])) {
      diagnostics.push_back("objective coefficient of " + var_label(j) +
                            " is not finite");
    }
  }

  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const LinearConstraint& row = problem.constraints[i];
    if (row.coefficients.size() != n) {
      diagnostics.push_back(row_label(i) + " has " +
                            std::to_string(row.coefficients.size()) +
                            " coefficients, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < row.coefficients.size(); ++j) {
      if (!is_finite(row.coefficients[j])) {
        diagnostics.push_back(row_label(i) + " coefficient " +
                              std::to_string(j) + " is not finite");
        break;
      }
    }
    if (!is_finite(row.rhs)) {
      diagnostics.push_back(row_label(i) + " right-hand side is not finite");
    }
  }

  const std::size_t nb = std::min({problem.lower.size(), problem.upper.size(),
                                   static_cast<std::size_t>(n)});
  for (std::size_t j = 0; j < nb; ++j) {
    const double lo = problem.lower[j];
    const double hi = problem.upper[j];
    if (std::isnan(lo) || std::isnan(hi)) {
      diagnostics.push_back(var_label(j) + " has a NaN bound");
      continue;
    }
    if (lo > hi) {
      diagnostics.push_back(var_label(j) + " has lower bound " +
                            std::to_string(lo) + " above upper bound " +
                            std::to_string(hi));
    }
    if (j < problem.kind.size()) {
      const VarKind kind = problem.kind[j];
      if (kind == VarKind::kBinary && (lo < 0.0 || hi > 1.0)) {
        diagnostics.push_back("binary " + var_label(j) +
                              " has bounds outside [0, 1]");
      }
      if ((kind == VarKind::kInteger || kind == VarKind::kBinary) &&
          (!is_finite(lo) || !is_finite(hi))) {
        diagnostics.push_back("integer " + var_label(j) +
                              " has an infinite bound");
      }
    }
  }

  return diagnostics;
}

MipProblem relax(const MipProblem& problem) {
  MipProblem out = problem;
  for (std::size_t j = 0; j < out.kind.size(); ++j) {
    if (out.kind[j] == VarKind::kBinary) {
      if (j < out.lower.size()) out.lower[j] = std::max(out.lower[j], 0.0);
      if (j < out.upper.size()) out.upper[j] = std::min(out.upper[j], 1.0);
    }
    out.kind[j] = VarKind::kContinuous;
  }
  return out;
}

Evaluation evaluate(const MipProblem& problem, std::span<const double> x,
                    const Tolerances& tol) {
  const std::size_t n = problem.num_vars();
  if (x.size() != n) {
    throw DimensionMismatch("evaluate: point has size " +
                            std::to_string(x.size()) + ", expected " +
                            std::to_string(n));
  }

  Evaluation result;
  for (std::size_t j = 0; j < n; ++j) {
    result.objective += problem.objective[j] * x[j];
  }

  double worst = 0.0;
  for (const LinearConstraint& row : problem.constraints) {
    double activity = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      activity += row.coefficients[j] * x[j];
    }
    const double over = activity - row.rhs;
    switch (row.relation) {
      case Relation::kLessEqual:
        worst = std::max(worst, over);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, -over);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(over));
        break;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    worst = std::max(worst, problem.lower[j] - x[j]);
    worst = std::max(worst, x[j] - problem.upper[j]);
  }
  result.max_violation = std::max(worst, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    if (problem.kind[j] == VarKind::kContinuous) continue;
    if (std::abs(x[j] - std::round(x[j])) > tol.integrality) {
      result.integral = false;
      break;
    }
  }
  return result;
}

}  // namespace oracular
