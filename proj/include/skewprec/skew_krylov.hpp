#pragma once

#include <span>
#include <vector>

#include "skewprec/dense.hpp"
#include "skewprec/skew_operator.hpp"
#include "skewprec/types.hpp"

namespace skewprec {

/// Basis of the skew Lanczos process: Q has orthonormal columns and
/// Q^T J Q = S_k, the tridiagonal with +alphas on the superdiagonal and
/// -alphas on the subdiagonal. On early breakdown Q keeps the vectors
/// produced so far (then J Q = Q S_k exactly) and alphas stays one shorter
/// than the column count.
struct LanczosBasis {
  DenseMatrix q;
  std::vector<double> alphas;
};

/// Runs k steps of the recurrence q_{i+1} = -(J q_i - alpha_{i-1} q_{i-1})
/// / alpha_i starting from `start` (a normalized copy is taken). No
/// reorthogonalization.
LanczosBasis skew_lanczos(const SkewLinOp& op, std::span<const double> start,
                          Index k);

/// Same with the normalized all-ones start vector.
LanczosBasis skew_lanczos(const SkewLinOp& op, Index k);

/// Packs the basis as the correction Q S_k Q^T consumed by
/// SkewOperator::set_correction; subtracting it zeroes the extreme
/// eigenvalues captured by the basis.
DeflationCorrection make_deflation(const LanczosBasis& basis);

/// One simultaneous mrs run on (alpha I + J) X = B. Histories carry the
/// relative residual estimate per right-hand side, starting at 1 (0 for a
/// zero column, which is returned as already solved). true_residuals are
/// ||b_j - alpha x_j - J x_j||_2 recomputed at exit.
struct MrsResult {
  DenseMatrix x;
  Index iterations = 0;
  bool converged = false;
  std::vector<double> estimates;
  std::vector<double> true_residuals;
  std::vector<std::vector<double>> histories;
};

MrsResult mrs_solve(const SkewLinOp& op, double alpha, const DenseMatrix& b,
                    double tol, Index maxit);

MrsResult mrs_solve(const SkewLinOp& op, double alpha,
                    std::span<const double> b, double tol, Index maxit);

} // namespace skewprec
