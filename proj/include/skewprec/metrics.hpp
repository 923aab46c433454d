#pragma once

#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

struct MatrixMetrics {
  /// ||(X - X^T)/2||_F / ||X - diag(X)||_F; defined as 1 when the
  /// off-diagonal part vanishes.
  double skew_symmetry_ratio = 0.0;
  /// ||diag(X) - I||_F.
  double diagonal_distance = 0.0;
};

MatrixMetrics metrics(const SparseMatrix& x);

} // namespace skewprec
