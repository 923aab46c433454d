#pragma once

#include <span>
#include <vector>

#include "skewprec/sparse_matrix.hpp"
#include "skewprec/transversal.hpp"

namespace skewprec {

/// Sparsity structure allowed for the symmetrizing factor S.
enum class SymmetrizerPattern { diagonal, tridiagonal, pattern_of_matrix };

/// Overdetermined least-squares problem min_s ||B s - rhs||^2 whose solution
/// makes Abar*S as close to shifted skew-symmetric as the pattern allows.
/// Unknown q corresponds to the q-th stored entry of `s_pattern` in
/// column-major order.
struct LlsProblem {
  SparseMatrix b;    // (neq + n) x m
  std::vector<double> rhs;
  Index skew_row_count = 0; // neq: one row per strict-upper pair
  SparseMatrix s_pattern;   // pattern of S, values unused
  double gamma = 1.0;
};

/// Assembles the problem: for every strict-upper position (i, j) in the
/// symmetrized pattern of Abar*S a row enforcing
/// (Abar S)_ij + (Abar S)_ji = 0, then n rows sqrt(gamma) * (Abar S)_ii
/// with target sqrt(gamma).
LlsProblem build_lls(const SparseMatrix& abar, SymmetrizerPattern pattern,
                     double gamma);

/// Least-squares solution via the normal equations (sparse Cholesky with
/// RCM preordering and iterative refinement, CG fallback). Throws
/// RankDeficiencyError when neither path resolves the system.
std::vector<double> solve_lls(const LlsProblem& problem);

struct SkewSymmetrizer {
  SymmetrizerPattern pattern = SymmetrizerPattern::tridiagonal;
  SparseMatrix s;
  double gamma = 1.0;
  double objective_value = 0.0; // ||B s - rhs||^2 at the solution
};

/// Full preprocessing result: Ahat = P D_r A D_c S with its scaling and
/// symmetrizer. Solutions of Ahat xhat = transform_rhs(b) map back through
/// x = D_c S xhat.
struct SymmetrizedSystem {
  ScaledSystem scaling;
  SkewSymmetrizer symmetrizer;
  SparseMatrix a_hat;

  std::vector<double> transform_rhs(std::span<const double> b) const {
    return scaling.transform_rhs(b);
  }
  std::vector<double> recover_solution(std::span<const double> xhat) const {
    return scaling.recover_solution(spmv(symmetrizer.s, xhat));
  }
};

SymmetrizedSystem skew_symmetrize(const SparseMatrix& a,
                                  SymmetrizerPattern pattern, double gamma);

} // namespace skewprec
