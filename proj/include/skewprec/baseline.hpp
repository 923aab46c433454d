#pragma once

#include <span>
#include <vector>

#include "skewprec/sparse_matrix.hpp"
#include "skewprec/two_level.hpp"
#include "skewprec/types.hpp"

namespace skewprec {

/// ILU(0) factors; the joint nonzero pattern of l and u never exceeds the
/// pattern of the factored matrix.
struct IluFactor {
  SparseMatrix l; // unit lower triangular, diagonal stored
  SparseMatrix u; // upper triangular, diagonal last in each column
};

/// Incomplete LU with zero fill: Gaussian elimination where updates landing
/// outside the input pattern are discarded. Throws FactorizationBreakdown
/// on a zero pivot.
IluFactor ilu0(const SparseMatrix& a);

/// x = U^{-1} L^{-1} b.
std::vector<double> ilu_solve(const IluFactor& f, std::span<const double> b);

struct BaselineOptions {
  double tol = 1e-5;
  Index maxit = 2000;
};

struct BaselineReport {
  std::vector<double> x;
  SolveStatus status = SolveStatus::maxit;
  double iterations = 0.0;
  std::vector<double> history;
  double relres = 0.0;        // on the input system A x = b
  double relres_scaled = 0.0; // on the scaled and reordered system
};

/// The comparison pipeline: maximum-product transversal and scaling, reverse
/// Cuthill-McKee reordering, ilu(0), right-preconditioned tfqmr. A pivot
/// breakdown in the factorization is reported through the status rather
/// than thrown; giving up on hard systems is this method's normal mode of
/// failure and callers are expected to inspect the report.
BaselineReport mps_rcm_solve(const SparseMatrix& a, std::span<const double> b,
                             const BaselineOptions& opt);

} // namespace skewprec
