#include "skewprec/metrics.hpp"

#include <cmath>

namespace skewprec {

MatrixMetrics metrics(const SparseMatrix& x) {
  if (!x.square())
    throw DimensionError("metrics: matrix not square");
  const SparseMatrix xt = transpose(x);
  const SparseMatrix skew = add(x, xt, 0.5, -0.5);

  double offdiag_sq = 0.0;
  for (Index j = 0; j < x.ncols(); ++j)
    for (Index p = x.col_begin(j); p < x.col_end(j); ++p)
      if (x.row_at(p) != j)
        offdiag_sq += x.value_at(p) * x.value_at(p);

  MatrixMetrics m;
  const double denom = std::sqrt(offdiag_sq);
  m.skew_symmetry_ratio =
      denom == 0.0 ? 1.0 : frobenius_norm(skew) / denom;

  double diag_sq = 0.0;
  const std::vector<double> d = diagonal(x);
  for (double v : d)
    diag_sq += (v - 1.0) * (v - 1.0);
  m.diagonal_distance = std::sqrt(diag_sq);
  return m;
}

} // namespace skewprec
