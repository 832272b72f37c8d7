// SPDX-License-Identifier: Apache-2.0

#ifndef ORACULAR_LINALG_HPP_
#define ORACULAR_LINALG_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace oracular {

// Dense row-major matrix of doubles.  Deliberately minimal: the solvers in
// this library work at desk scale, where a flat vector plus explicit index
// arithmetic beats any abstraction tax.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Lower-triangular Cholesky factor L with M = L Lᵀ.  Entries strictly
// above the diagonal are kept at zero.
struct CholeskyFactor {
  DenseMatrix lower;

  std::size_t dim() const { return lower.rows(); }
};

struct MixedSolveResult {
  std::vector<double> x;
  // Refinement steps actually taken (0 when the first solve already meets
  // the target).
  int refinement_steps = 0;
  // Final normwise backward error ‖b - Mx‖ / (‖M‖_F ‖x‖ + ‖b‖).
  double backward_error = 0.0;
};

// y = M x.
std::vector<double> multiply(const DenseMatrix& m, std::span<const double> x);

// Weighted normal matrix H = Σᵢ wᵢ/sᵢ² · aᵢ aᵢᵀ over the rows aᵢ of A.
// This is the curvature matrix of a weighted log-barrier whose i-th slack
// is sᵢ.  Preconditions: s and w strictly positive and sized to A's rows,
// no zero row in A.  The inner accumulation runs over rows in ascending
// order and only the lower triangle is computed (then mirrored), so the
// result is symmetric to the bit.
DenseMatrix form_normal_matrix(const DenseMatrix& a, std::span<const double> s,
                               std::span<const double> w);

// Right-looking Cholesky factorization.  Requires a symmetric matrix
// (checked to 1e-12 relative); throws NotPositiveDefinite when a pivot
// falls below 1e-13 times the largest original diagonal entry.
CholeskyFactor cholesky(const DenseMatrix& m);

// Solves M x = b given the factor of M (forward then backward triangular
// substitution).  Throws DimensionMismatch on size disagreement.
std::vector<double> solve(const CholeskyFactor& factor,
                          std::span<const double> b);

// Returns the factor of M + sigma · v vᵀ in O(n²) via a sweep of plane
// rotations.  Requires sigma > 0 (rank-one downdates are out of scope; cut
// removal triggers refactorization instead).
CholeskyFactor rank_one_update(const CholeskyFactor& factor,
                               std::span<const double> v, double sigma);

// One-norm condition estimate κ̂₁(M) from the factor: exact ‖M‖₁ (columns
// reconstructed from L) times a Hager-style iterative estimate of ‖M⁻¹‖₁.
// Always ≥ 1; intended to be within an order of magnitude of the truth.
double condition_estimate(const CholeskyFactor& factor);

// Factors M in float32, then iteratively refines the solution of M x = b
// in double until the normwise backward error drops to 1e-12 (and on to
// the rounding floor while progress lasts), at most 10 refinement steps.
// Throws NoConvergence when the reduced-precision factorization breaks
// down or the target is not reached.
MixedSolveResult mixed_precision_solve(const DenseMatrix& m,
                                       std::span<const double> b);

}  // namespace oracular

#endif  // ORACULAR_LINALG_HPP_
