#include "skewprec/dense.hpp"

#include <cmath>
#include <utility>

namespace skewprec {

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    m(i, i) = 1.0;
  return m;
}

std::vector<double> dense_matvec(const DenseMatrix& m,
                                 std::span<const double> x) {
  if (static_cast<Index>(x.size()) != m.cols())
    throw DimensionError("dense_matvec: size mismatch");
  std::vector<double> y(m.rows(), 0.0);
  for (Index j = 0; j < m.cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0)
      continue;
    auto cj = m.col(j);
    for (Index i = 0; i < m.rows(); ++i)
      y[i] += cj[i] * xj;
  }
  return y;
}

std::vector<double> dense_matvec_transpose(const DenseMatrix& m,
                                           std::span<const double> x) {
  if (static_cast<Index>(x.size()) != m.rows())
    throw DimensionError("dense_matvec_transpose: size mismatch");
  std::vector<double> y(m.cols(), 0.0);
  for (Index j = 0; j < m.cols(); ++j) {
    auto cj = m.col(j);
    double s = 0.0;
    for (Index i = 0; i < m.rows(); ++i)
      s += cj[i] * x[i];
    y[j] = s;
  }
  return y;
}

DenseLu::DenseLu(DenseMatrix m) : lu_(std::move(m)) {
  if (lu_.rows() != lu_.cols())
    throw DimensionError("DenseLu: matrix not square");
  const Index n = lu_.rows();
  piv_.resize(n);
  for (Index k = 0; k < n; ++k) {
    Index p = k;
    for (Index i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(p, k)))
        p = i;
    piv_[k] = p;
    if (p != k)
      for (Index j = 0; j < n; ++j)
        std::swap(lu_(k, j), lu_(p, j));
    const double pivot = lu_(k, k);
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      singular_ = true;
      return;
    }
    for (Index i = k + 1; i < n; ++i) {
      const double l = lu_(i, k) / pivot;
      lu_(i, k) = l;
      if (l == 0.0)
        continue;
      for (Index j = k + 1; j < n; ++j)
        lu_(i, j) -= l * lu_(k, j);
    }
  }
}

std::vector<double> DenseLu::solve(std::span<const double> b) const {
  if (singular_)
    throw SolverError("DenseLu: singular matrix");
  const Index n = lu_.rows();
  if (static_cast<Index>(b.size()) != n)
    throw DimensionError("DenseLu::solve: size mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (Index k = 0; k < n; ++k)
    std::swap(x[k], x[piv_[k]]);
  for (Index k = 0; k < n; ++k)
    for (Index i = k + 1; i < n; ++i)
      x[i] -= lu_(i, k) * x[k];
  for (Index k = n - 1; k >= 0; --k) {
    x[k] /= lu_(k, k);
    for (Index i = 0; i < k; ++i)
      x[i] -= lu_(i, k) * x[k];
  }
  return x;
}

} // namespace skewprec
