// SPDX-License-Identifier: Apache-2.0

#include "oracular/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oracular/errors.hpp"

namespace oracular {

namespace {

constexpr double kPivotThreshold = 1e-13;   // relative to the max diagonal
constexpr double kSymmetryTol = 1e-12;      // relative symmetry check
constexpr double kRefineTarget = 1e-12;     // backward-error target
constexpr double kRefineFloor = 100.0 * std::numeric_limits<double>::epsilon();
constexpr int kMaxRefineSteps = 10;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double frobenius(const DenseMatrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

void check_square(const DenseMatrix& m, const char* where) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(where) + ": matrix is " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
  }
}

// Forward substitution L y = b, then back substitution Lᵀ x = y, writing
// the solution over `x`.
void solve_in_place(const DenseMatrix& l, std::vector<double>& x) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = x[i];
    for (std::size_t j = 0; j < i; ++j) sum -= l(i, j) * x[j];
    x[i] = sum / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) sum -= l(j, ii) * x[j];
    x[ii] = sum / l(ii, ii);
  }
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> multiply(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) {
    throw DimensionMismatch("multiply: vector has size " +
                            std::to_string(x.size()) + ", expected " +
                            std::to_string(m.cols()));
  }
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) sum += m(i, j) * x[j];
    y[i] = sum;
  }
  return y;
}

DenseMatrix form_normal_matrix(const DenseMatrix& a, std::span<const double> s,
                               std::span<const double> w) {
  const std::size_t rows = a.rows();
  const std::size_t n = a.cols();
  if (s.size() != rows || w.size() != rows) {
    throw DimensionMismatch(
        "form_normal_matrix: slack/weight vectors must match row count " +
        std::to_string(rows));
  }
  std::vector<double> coef(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!(s[i] > 0.0)) {
      throw std::invalid_argument("form_normal_matrix: slack " +
                                  std::to_string(i) + " is not positive");
    }
    if (!(w[i] > 0.0)) {
      throw std::invalid_argument("form_normal_matrix: weight " +
                                  std::to_string(i) + " is not positive");
    }
    double max_abs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      max_abs = std::max(max_abs, std::abs(a(i, j)));
    }
    if (max_abs == 0.0) {
      throw std::invalid_argument("form_normal_matrix: row " +
                                  std::to_string(i) + " is all zero");
    }
    coef[i] = w[i] / (s[i] * s[i]);
  }

  DenseMatrix h(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        sum += coef[i] * a(i, j) * a(i, k);
      }
      h(j, k) = sum;
      h(k, j) = sum;
    }
  }
  return h;
}

CholeskyFactor cholesky(const DenseMatrix& m) {
  check_square(m, "cholesky");
  const std::size_t n = m.rows();

  double max_abs = 0.0;
  for (double x : m.data()) max_abs = std::max(max_abs, std::abs(x));
  const double sym_tol = kSymmetryTol * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > sym_tol) {
        throw std::invalid_argument("cholesky: matrix is not symmetric at (" +
                                    std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      }
    }
  }

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
  const double breakdown = kPivotThreshold * std::max(max_diag, 1e-300);

  // Right-looking outer-product form: after step k the trailing block
  // holds the Schur complement, so the pivot test sees fully updated
  // diagonal entries.
  CholeskyFactor factor{DenseMatrix(n, n)};
  DenseMatrix& l = factor.lower;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) l(i, j) = m(i, j);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = l(k, k);
    if (!(pivot > breakdown)) {
      throw NotPositiveDefinite(k, pivot);
    }
    const double lkk = std::sqrt(pivot);
    l(k, k) = lkk;
    for (std::size_t i = k + 1; i < n; ++i) l(i, k) /= lkk;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double ljk = l(j, k);
      if (ljk == 0.0) continue;
      for (std::size_t i = j; i < n; ++i) {
        l(i, j) -= l(i, k) * ljk;
      }
    }
  }
  return factor;
}

std::vector<double> solve(const CholeskyFactor& factor,
                          std::span<const double> b) {
  const std::size_t n = factor.dim();
  if (b.size() != n) {
    throw DimensionMismatch("solve: rhs has size " + std::to_string(b.size()) +
                            ", expected " + std::to_string(n));
  }
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(factor.lower, x);
  return x;
}

CholeskyFactor rank_one_update(const CholeskyFactor& factor,
                               std::span<const double> v, double sigma) {
  const std::size_t n = factor.dim();
  if (v.size() != n) {
    throw DimensionMismatch("rank_one_update: vector has size " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(n));
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument(
        "rank_one_update: sigma must be positive (downdates unsupported)");
  }

  CholeskyFactor out = factor;
  DenseMatrix& l = out.lower;
  const double root = std::sqrt(sigma);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = root * v[i];

  // Sweep of plane rotations: column i absorbs u[i], the rotation is then
  // applied to the remainder of u.  Each step costs O(n - i), for O(n²)
  // overall against the O(n³) of refactorization.
  for (std::size_t i = 0; i < n; ++i) {
    const double lii = l(i, i);
    const double r = std::hypot(lii, u[i]);
    const double c = r / lii;
    const double s = u[i] / lii;
    l(i, i) = r;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double lj = (l(j, i) + s * u[j]) / c;
      u[j] = c * u[j] - s * lj;
      l(j, i) = lj;
    }
  }
  return out;
}

double condition_estimate(const CholeskyFactor& factor) {
  const std::size_t n = factor.dim();
  if (n == 0) return 1.0;
  const DenseMatrix& l = factor.lower;

  // ‖M‖₁ exactly: column j of M = L (Lᵀ eⱼ) costs O(n²); fine at the
  // sizes this library works at.
  double norm_m = 0.0;
  std::vector<double> col(n), tmp(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = (i <= j) ? l(j, i) : 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) acc += l(i, k) * tmp[k];
      col[i] = acc;
      sum += std::abs(acc);
    }
    norm_m = std::max(norm_m, sum);
  }

  // Hager's estimator for ‖M⁻¹‖₁, with the usual alternating-sign probe
  // as a second lower bound.
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  std::size_t last_index = n;  // sentinel: no unit vector chosen yet
  for (int pass = 0; pass < 5; ++pass) {
    std::vector<double> y = x;
    solve_in_place(l, y);
    double y1 = 0.0;
    for (double v : y) y1 += std::abs(v);
    est = std::max(est, y1);

    std::vector<double> xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    solve_in_place(l, xi);
    std::size_t best = 0;
    double zmax = 0.0, zx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double az = std::abs(xi[i]);
      if (az > zmax) {
        zmax = az;
        best = i;
      }
      zx += xi[i] * x[i];
    }
    if (zmax <= zx || best == last_index) break;
    last_index = best;
    std::fill(x.begin(), x.end(), 0.0);
    x[best] = 1.0;
  }
  std::vector<double> probe(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 1.0 + static_cast<double>(i) / std::max<std::size_t>(
                               1, n - 1);
    probe[i] = ((i % 2) == 0) ? t : -t;
  }
  double probe1 = 0.0;
  for (double v : probe) probe1 += std::abs(v);
  solve_in_place(l, probe);
  double sol1 = 0.0;
  for (double v : probe) sol1 += std::abs(v);
  est = std::max(est, sol1 / probe1);

  return std::max(1.0, norm_m * est);
}

MixedSolveResult mixed_precision_solve(const DenseMatrix& m,
                                       std::span<const double> b) {
  check_square(m, "mixed_precision_solve");
  const std::size_t n = m.rows();
  if (b.size() != n) {
    throw DimensionMismatch("mixed_precision_solve: rhs has size " +
                            std::to_string(b.size()) + ", expected " +
                            std::to_string(n));
  }

  // Factor in float32.  The 24-bit mantissa halves the work of the O(n³)
  // stage; the O(n²) refinement below runs in double and recovers full
  // working accuracy as long as the float factor is usable at all.
  std::vector<float> a(n * n);
  float max_diag_f = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = static_cast<float>(m(i, j));
    }
    max_diag_f = std::max(max_diag_f, a[i * n + i]);
  }
  const float breakdown_f = 1e-7f * std::max(max_diag_f, 1e-30f);
  for (std::size_t k = 0; k < n; ++k) {
    const float pivot = a[k * n + k];
    if (!(pivot > breakdown_f)) {
      throw NoConvergence(
          "mixed_precision_solve: float32 factorization broke down at pivot " +
          std::to_string(k));
    }
    const float lkk = std::sqrt(pivot);
    a[k * n + k] = lkk;
    for (std::size_t i = k + 1; i < n; ++i) a[i * n + k] /= lkk;
    for (std::size_t j = k + 1; j < n; ++j) {
      const float ljk = a[j * n + k];
      if (ljk == 0.0f) continue;
      for (std::size_t i = j; i < n; ++i) {
        a[i * n + j] -= a[i * n + k] * ljk;
      }
    }
  }

  // Promote the factor once; all solves and residuals run in double.
  DenseMatrix lf(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      lf(i, j) = static_cast<double>(a[i * n + j]);
    }
  }

  const double norm_mf = frobenius(m);
  const double norm_b = norm2(b);
  auto backward_error = [&](const std::vector<double>& x,
                            std::vector<double>& r) {
    r = multiply(m, x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double denom = norm_mf * norm2(x) + norm_b;
    return (denom > 0.0) ? norm2(r) / denom : 0.0;
  };

  MixedSolveResult result;
  result.x.assign(b.begin(), b.end());
  solve_in_place(lf, result.x);
  std::vector<double> r;
  double err = backward_error(result.x, r);

  // Refine until the target is met, then keep polishing while each step
  // still at least halves the error (stopping at the rounding floor).
  // This leaves the final residual at the best the factor can deliver
  // rather than just under the target.
  int steps = 0;
  while (steps < kMaxRefineSteps) {
    if (err <= kRefineTarget && err <= kRefineFloor) break;
    std::vector<double> d = r;
    solve_in_place(lf, d);
    std::vector<double> next = result.x;
    for (std::size_t i = 0; i < n; ++i) next[i] += d[i];
    std::vector<double> r_next;
    const double err_next = backward_error(next, r_next);
    if (err_next >= 0.5 * err) {
      if (err_next < err) {
        result.x.swap(next);
        r.swap(r_next);
        err = err_next;
        ++steps;
      }
      break;  // stalled: no meaningful progress left
    }
    result.x.swap(next);
    r.swap(r_next);
    err = err_next;
    ++steps;
  }

  if (err > kRefineTarget) {
    throw NoConvergence(
        "mixed_precision_solve: refinement stalled at backward error " +
            std::to_string(err),
        err);
  }
  result.refinement_steps = steps;
  result.backward_error = err;
  return result;
}

}  // namespace oracular
