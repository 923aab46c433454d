#pragma once

#include <span>
#include <vector>

#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

/// Sparse Cholesky A(perm, perm) = L L^T with an RCM preordering; used for
/// the normal equations of the symmetrizer least-squares problem. The
/// factorization reports failure (nonpositive pivot or fill beyond
/// `max_fill`) instead of throwing, so callers can fall back to an
/// iterative solver.
class SparseCholesky {
public:
  static SparseCholesky factor(const SparseMatrix& a,
                               Index max_fill = 50'000'000);

  bool ok() const { return ok_; }
  /// Original index of the failed pivot column; -1 when ok().
  Index failed_column() const { return failed_column_; }

  /// Solves A x = b. Only valid when ok().
  std::vector<double> solve(std::span<const double> b) const;

  const SparseMatrix& l() const { return l_; }
  std::span<const Index> perm() const { return perm_; }

private:
  SparseCholesky() = default;
  bool ok_ = false;
  Index failed_column_ = -1;
  SparseMatrix l_;
  std::vector<Index> perm_;
};

} // namespace skewprec
