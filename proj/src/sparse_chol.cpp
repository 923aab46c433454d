#include "skewprec/sparse_chol.hpp"

#include <algorithm>
#include <cmath>

#include "skewprec/ordering.hpp"

namespace skewprec {

namespace {

// Elimination tree of a symmetric matrix from its upper triangle, with path
// compression through `ancestor`.
std::vector<Index> etree(const SparseMatrix& a) {
  const Index n = a.ncols();
  std::vector<Index> parent(n, -1), ancestor(n, -1);
  for (Index k = 0; k < n; ++k)
    for (Index p = a.col_begin(k); p < a.col_end(k); ++p) {
      Index i = a.row_at(p);
      while (i != -1 && i < k) {
        const Index next = ancestor[i];
        ancestor[i] = k;
        if (next == -1)
          parent[i] = k;
        i = next;
      }
    }
  return parent;
}

} // namespace

SparseCholesky SparseCholesky::factor(const SparseMatrix& a, Index max_fill) {
  if (!a.square())
    throw DimensionError("SparseCholesky: matrix not square");
  const Index n = a.nrows();

  SparseCholesky r;
  r.perm_ = rcm_order(a);
  const SparseMatrix ap = permute_symmetric(a, r.perm_);
  const std::vector<Index> parent = etree(ap);

  // Up-looking factorization. Columns of L grow by appending row k at step
  // k, so each column stays sorted with its diagonal first. The row pattern
  // of L(k, :) is the elimination-tree reach of column k's entries,
  // collected in topological order so the sparse triangular solve can run
  // straight through it.
  std::vector<std::vector<Index>> lrows(n);
  std::vector<std::vector<double>> lvals(n);
  std::vector<double> x(n, 0.0);
  std::vector<Index> s(n), stack(n), mark(n, -1);
  Index total_nnz = 0;

  for (Index k = 0; k < n; ++k) {
    mark[k] = k;
    Index top = n;
    double d = 0.0;
    for (Index p = ap.col_begin(k); p < ap.col_end(k); ++p) {
      const Index row = ap.row_at(p);
      if (row > k)
        continue;
      x[row] = ap.value_at(p);
      if (row == k) {
        d = x[k];
        continue;
      }
      Index t = row, len = 0;
      while (mark[t] != k) {
        stack[len++] = t;
        mark[t] = k;
        t = parent[t];
      }
      while (len > 0)
        s[--top] = stack[--len];
    }
    for (Index q = top; q < n; ++q) {
      const Index j = s[q];
      const double lkj = x[j] / lvals[j][0];
      x[j] = 0.0;
      for (std::size_t t = 1; t < lrows[j].size(); ++t)
        x[lrows[j][t]] -= lvals[j][t] * lkj;
      d -= lkj * lkj;
      lrows[j].push_back(k);
      lvals[j].push_back(lkj);
      ++total_nnz;
    }
    x[k] = 0.0;
    if (!(d > 0.0) || !std::isfinite(d) || total_nnz + 1 > max_fill) {
      r.ok_ = false;
      r.failed_column_ = r.perm_[k];
      return r;
    }
    lrows[k].push_back(k);
    lvals[k].push_back(std::sqrt(d));
    ++total_nnz;
  }

  std::vector<Index> colptr(n + 1, 0);
  std::vector<Index> rowind;
  std::vector<double> values;
  rowind.reserve(total_nnz);
  values.reserve(total_nnz);
  for (Index j = 0; j < n; ++j) {
    rowind.insert(rowind.end(), lrows[j].begin(), lrows[j].end());
    values.insert(values.end(), lvals[j].begin(), lvals[j].end());
    colptr[j + 1] = static_cast<Index>(rowind.size());
  }
  r.l_ = SparseMatrix(n, n, std::move(colptr), std::move(rowind),
                      std::move(values));
  r.ok_ = true;
  return r;
}

std::vector<double> SparseCholesky::solve(std::span<const double> b) const {
  if (!ok_)
    throw SolverError("SparseCholesky::solve: factorization not available");
  const Index n = l_.nrows();
  if (static_cast<Index>(b.size()) != n)
    throw DimensionError("SparseCholesky::solve: size mismatch");
  std::vector<double> y(n);
  for (Index i = 0; i < n; ++i)
    y[i] = b[perm_[i]];
  // Forward L y' = y; diagonal is the first stored entry of each column.
  for (Index j = 0; j < n; ++j) {
    y[j] /= l_.value_at(l_.col_begin(j));
    for (Index p = l_.col_begin(j) + 1; p < l_.col_end(j); ++p)
      y[l_.row_at(p)] -= l_.value_at(p) * y[j];
  }
  // Backward L^T x' = y'.
  for (Index j = n - 1; j >= 0; --j) {
    for (Index p = l_.col_begin(j) + 1; p < l_.col_end(j); ++p)
      y[j] -= l_.value_at(p) * y[l_.row_at(p)];
    y[j] /= l_.value_at(l_.col_begin(j));
  }
  std::vector<double> out(n);
  for (Index i = 0; i < n; ++i)
    out[perm_[i]] = y[i];
  return out;
}

} // namespace skewprec
