#include "skewprec/skew_operator.hpp"

#include <utility>

namespace skewprec {

std::vector<double> apply_skew_tridiagonal(std::span<const double> alphas,
                                           std::span<const double> c) {
  const Index k = static_cast<Index>(c.size());
  std::vector<double> y(k, 0.0);
  for (Index i = 0; i < k; ++i) {
    double s = 0.0;
    if (i + 1 < k)
      s += alphas[i] * c[i + 1];
    if (i > 0)
      s -= alphas[i - 1] * c[i - 1];
    y[i] = s;
  }
  return y;
}

SkewOperator::SkewOperator(SparseMatrix strict_upper)
    : upper_(std::move(strict_upper)) {
  if (!upper_.square())
    throw DimensionError("SkewOperator: matrix not square");
  for (Index j = 0; j < upper_.ncols(); ++j)
    for (Index p = upper_.col_begin(j); p < upper_.col_end(j); ++p)
      if (upper_.row_at(p) >= j)
        throw DimensionError(
            "SkewOperator: entry on or below the diagonal");
}

void SkewOperator::apply(std::span<const double> x,
                         std::span<double> y) const {
  const Index n = dim();
  if (static_cast<Index>(x.size()) != n || static_cast<Index>(y.size()) != n)
    throw DimensionError("SkewOperator::apply: size mismatch");
  for (Index i = 0; i < n; ++i)
    y[i] = 0.0;
  // J x = U x - U^T x in one sweep over the stored entries.
  for (Index j = 0; j < n; ++j)
    for (Index p = upper_.col_begin(j); p < upper_.col_end(j); ++p) {
      const Index i = upper_.row_at(p);
      const double v = upper_.value_at(p);
      y[i] += v * x[j];
      y[j] -= v * x[i];
    }
  if (correction_) {
    const auto& c = *correction_;
    std::vector<double> ct = dense_matvec_transpose(c.q, x);
    std::vector<double> sc = apply_skew_tridiagonal(c.alphas, ct);
    std::vector<double> qs = dense_matvec(c.q, sc);
    for (Index i = 0; i < n; ++i)
      y[i] -= qs[i];
  }
}

void SkewOperator::set_correction(DeflationCorrection c) {
  if (c.q.rows() != dim())
    throw DimensionError("set_correction: basis has wrong row count");
  if (c.q.cols() > 0 &&
      static_cast<Index>(c.alphas.size()) != c.q.cols() - 1)
    throw DimensionError("set_correction: alphas length must be k-1");
  correction_ = std::move(c);
}

SparseMatrix SkewOperator::to_full() const {
  return add(upper_, transpose(upper_), 1.0, -1.0);
}

std::pair<SparseMatrix, SkewOperator> split_sym_skew(const SparseMatrix& a) {
  if (!a.square())
    throw DimensionError("split_sym_skew: matrix not square");
  const SparseMatrix at = transpose(a);
  SparseMatrix sym = add(a, at, 0.5, 0.5);
  SparseMatrix skew_full = add(a, at, 0.5, -0.5);
  // Keep the strict upper triangle of the skew part.
  std::vector<Index> colptr(skew_full.ncols() + 1, 0);
  std::vector<Index> rowind;
  std::vector<double> values;
  for (Index j = 0; j < skew_full.ncols(); ++j) {
    for (Index p = skew_full.col_begin(j); p < skew_full.col_end(j); ++p)
      if (skew_full.row_at(p) < j) {
        rowind.push_back(skew_full.row_at(p));
        values.push_back(skew_full.value_at(p));
      }
    colptr[j + 1] = static_cast<Index>(rowind.size());
  }
  SparseMatrix upper(skew_full.nrows(), skew_full.ncols(), std::move(colptr),
                     std::move(rowind), std::move(values));
  return {std::move(sym), SkewOperator(std::move(upper))};
}

} // namespace skewprec
