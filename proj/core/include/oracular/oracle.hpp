// SPDX-License-Identifier: Apache-2.0

#ifndef ORACULAR_ORACLE_HPP_
#define ORACULAR_ORACLE_HPP_

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "oracular/problems.hpp"

namespace oracular {

// Reply carrying a function value and a subgradient at the query point:
// f(z) ≥ value + subgradient·(z − y) for all z.
struct OptimalityReply {
  double value = 0.0;
  std::vector<double> subgradient;
};

// Reply carrying a separating half-space normal·z ≤ rhs that the query
// point violates (or at best touches): normal·y ≥ rhs − coherence slack.
struct FeasibilityReply {
  std::vector<double> normal;
  double rhs = 0.0;
};

using OracleReply = std::variant<OptimalityReply, FeasibilityReply>;

// A first-order oracle for a convex function (or a feasibility region).
// Implementations must be pure: no internal state mutated by query(), so
// concurrent queries are safe.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::size_t dim() const = 0;

  // Evaluates at y (size dim()).  Throws OracleFailure when the point
  // cannot be evaluated; throws DimensionMismatch on a size mismatch.
  virtual OracleReply query(std::span<const double> y) const = 0;
};

// ---------------------------------------------------------------------------
// Built-in test objectives

// f(x) = ‖x − center‖².
class QuadraticOracle : public Oracle {
 public:
  explicit QuadraticOracle(std::vector<double> center);

  std::size_t dim() const override { return center_.size(); }
  OracleReply query(std::span<const double> y) const override;

 private:
  std::vector<double> center_;
};

// f(x) = maxᵢ |xᵢ − centerᵢ|.  Subgradient is ±eᵢ for the first attaining
// coordinate, and zero at the minimizer itself.
class MaxAbsOracle : public Oracle {
 public:
  explicit MaxAbsOracle(std::vector<double> center);

  std::size_t dim() const override { return center_.size(); }
  OracleReply query(std::span<const double> y) const override;

 private:
  std::vector<double> center_;
};

// Wraps an arbitrary callable; handy in tests.
class FunctionOracle : public Oracle {
 public:
  using Fn = std::function<OracleReply(std::span<const double>)>;

  FunctionOracle(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  std::size_t dim() const override { return dim_; }
  OracleReply query(std::span<const double> y) const override;

 private:
  std::size_t dim_;
  Fn fn_;
};

// Sign-flips an oracle so that maximizing a concave function becomes
// minimizing a convex one.
class NegatedOracle : public Oracle {
 public:
  explicit NegatedOracle(const Oracle& inner) : inner_(inner) {}

  std::size_t dim() const override { return inner_.dim(); }
  OracleReply query(std::span<const double> y) const override;

 private:
  const Oracle& inner_;
};

// ---------------------------------------------------------------------------
// Lagrangian duals
//
// Both duals are concave maximization problems; compose with NegatedOracle
// to feed them to a minimizing engine.

// Knapsack dual: L(λ) = λ·capacity + Σᵢ hᵢ(λ) over one multiplier λ ≥ 0,
// where hᵢ picks xᵢ = multiplicityᵢ exactly when pᵢ − λwᵢ > 0 (ties take
// xᵢ = 0).  The reply's value is L(λ) and its "subgradient" the
// supergradient capacity − w·x(λ).  Optional per-item bounds replace
// [0, multiplicity] when branching has tightened them.
class KnapsackDualOracle : public Oracle {
 public:
  explicit KnapsackDualOracle(KnapsackInstance instance);
  KnapsackDualOracle(KnapsackInstance instance, std::vector<double> items_lo,
                     std::vector<double> items_hi);

  std::size_t dim() const override { return 1; }
  OracleReply query(std::span<const double> y) const override;

  // Inner maximizer x(λ), exposed so a caller can test it for primal
  // feasibility.
  std::vector<double> inner_solution(double lambda) const;

  const KnapsackInstance& instance() const { return instance_; }

 private:
  KnapsackInstance instance_;
  std::vector<double> lo_, hi_;
};

// Multiplier interval [0, 2·max(1, maxᵢ profitᵢ/weightᵢ)]: beyond the
// largest profit density every hᵢ is flat, so the dual minimum lies inside.
std::pair<double, double> knapsack_dual_interval(const KnapsackInstance& inst);

// Set-partitioning dual over one multiplier per element:
// L(λ) = Σ_e λ_e + Σ_j min(0, c_j − Σ_{e ∈ col j} λ_e).
class SetPartitionDualOracle : public Oracle {
 public:
  explicit SetPartitionDualOracle(SetPartitionInstance instance);

  std::size_t dim() const override { return instance_.num_elements; }
  OracleReply query(std::span<const double> y) const override;

  const SetPartitionInstance& instance() const { return instance_; }

 private:
  SetPartitionInstance instance_;
};

// Symmetric multiplier box [−Λ, Λ]^m with Λ = 2·max(1, maxⱼ |costⱼ|).
std::pair<double, double> setpartition_dual_interval(
    const SetPartitionInstance& inst);

}  // namespace oracular

#endif  // ORACULAR_ORACLE_HPP_
