#include "skewprec/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skewprec {

SparseMatrix::SparseMatrix(Index nrows, Index ncols, std::vector<Index> colptr,
                           std::vector<Index> rowind,
                           std::vector<double> values)
    : nrows_(nrows), ncols_(ncols), colptr_(std::move(colptr)),
      rowind_(std::move(rowind)), values_(std::move(values)) {
  if (nrows_ < 0 || ncols_ < 0)
    throw DimensionError("sparse matrix: negative dimension");
  if (static_cast<Index>(colptr_.size()) != ncols_ + 1)
    throw DimensionError("sparse matrix: colptr has wrong length");
  if (colptr_.front() != 0 ||
      colptr_.back() != static_cast<Index>(rowind_.size()) ||
      rowind_.size() != values_.size())
    throw DimensionError("sparse matrix: inconsistent storage arrays");
  for (Index j = 0; j < ncols_; ++j) {
    if (colptr_[j] > colptr_[j + 1])
      throw DimensionError("sparse matrix: colptr not monotone");
    for (Index p = colptr_[j]; p < colptr_[j + 1]; ++p) {
      if (rowind_[p] < 0 || rowind_[p] >= nrows_)
        throw DimensionError("sparse matrix: row index out of range");
      if (p > colptr_[j] && rowind_[p - 1] >= rowind_[p])
        throw DimensionError("sparse matrix: rows not strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index nrows, Index ncols,
                                         std::span<const Triplet> entries) {
  for (const Triplet& t : entries)
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw DimensionError("from_triplets: entry out of range");

  std::vector<Index> order(entries.size());
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (entries[a].col != entries[b].col)
      return entries[a].col < entries[b].col;
    return entries[a].row < entries[b].row;
  });

  std::vector<Index> colptr(ncols + 1, 0);
  std::vector<Index> rowind;
  std::vector<double> values;
  rowind.reserve(entries.size());
  values.reserve(entries.size());
  Index last_col = -1, last_row = -1;
  for (Index idx : order) {
    const Triplet& t = entries[idx];
    if (t.col == last_col && t.row == last_row) {
      values.back() += t.value; // duplicate: sum
      continue;
    }
    rowind.push_back(t.row);
    values.push_back(t.value);
    colptr[t.col + 1] = static_cast<Index>(rowind.size());
    last_col = t.col;
    last_row = t.row;
  }
  // colptr[j+1] so far marks ends of nonempty columns only; fill the gaps
  // with a running maximum.
  for (Index j = 0; j < ncols; ++j)
    colptr[j + 1] = std::max(colptr[j + 1], colptr[j]);
  return SparseMatrix(nrows, ncols, std::move(colptr), std::move(rowind),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> colptr(n + 1), rowind(n);
  std::vector<double> values(n, 1.0);
  std::iota(colptr.begin(), colptr.end(), Index(0));
  std::iota(rowind.begin(), rowind.end(), Index(0));
  return SparseMatrix(n, n, std::move(colptr), std::move(rowind),
                      std::move(values));
}

double SparseMatrix::coeff(Index i, Index j) const {
  if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_)
    throw DimensionError("coeff: index out of range");
  auto first = rowind_.begin() + colptr_[j];
  auto last = rowind_.begin() + colptr_[j + 1];
  auto it = std::lower_bound(first, last, i);
  if (it == last || *it != i)
    return 0.0;
  return values_[it - rowind_.begin()];
}

SparseMatrix transpose(const SparseMatrix& a) {
  const Index m = a.nrows(), n = a.ncols();
  std::vector<Index> colptr(m + 1, 0);
  for (Index p = 0; p < a.nnz(); ++p)
    ++colptr[a.row_at(p) + 1];
  for (Index i = 0; i < m; ++i)
    colptr[i + 1] += colptr[i];
  std::vector<Index> next(colptr.begin(), colptr.end() - 1);
  std::vector<Index> rowind(a.nnz());
  std::vector<double> values(a.nnz());
  for (Index j = 0; j < n; ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p) {
      Index q = next[a.row_at(p)]++;
      rowind[q] = j;
      values[q] = a.value_at(p);
    }
  return SparseMatrix(n, m, std::move(colptr), std::move(rowind),
                      std::move(values));
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.nrows(), 0.0);
  spmv_add(a, x, y, 1.0);
  return y;
}

void spmv_add(const SparseMatrix& a, std::span<const double> x,
              std::span<double> y, double alpha) {
  if (static_cast<Index>(x.size()) != a.ncols() ||
      static_cast<Index>(y.size()) != a.nrows())
    throw DimensionError("spmv: size mismatch");
  for (Index j = 0; j < a.ncols(); ++j) {
    const double xj = alpha * x[j];
    if (xj == 0.0)
      continue;
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      y[a.row_at(p)] += a.value_at(p) * xj;
  }
}

namespace {

// Shared SpGEMM kernel; `numeric` keeps values, otherwise all ones.
SparseMatrix spgemm(const SparseMatrix& a, const SparseMatrix& b,
                    bool numeric) {
  if (a.ncols() != b.nrows())
    throw DimensionError("multiply: inner dimensions differ");
  const Index m = a.nrows(), n = b.ncols();
  std::vector<Index> colptr(n + 1, 0);
  std::vector<Index> rowind;
  std::vector<double> values;
  std::vector<double> acc(m, 0.0);
  std::vector<Index> mark(m, -1);
  std::vector<Index> cols;
  cols.reserve(m);
  for (Index j = 0; j < n; ++j) {
    cols.clear();
    for (Index pb = b.col_begin(j); pb < b.col_end(j); ++pb) {
      const Index k = b.row_at(pb);
      const double bkj = numeric ? b.value_at(pb) : 1.0;
      for (Index pa = a.col_begin(k); pa < a.col_end(k); ++pa) {
        const Index i = a.row_at(pa);
        if (mark[i] != j) {
          mark[i] = j;
          acc[i] = 0.0;
          cols.push_back(i);
        }
        if (numeric)
          acc[i] += a.value_at(pa) * bkj;
      }
    }
    std::sort(cols.begin(), cols.end());
    for (Index i : cols) {
      rowind.push_back(i);
      values.push_back(numeric ? acc[i] : 1.0);
    }
    colptr[j + 1] = static_cast<Index>(rowind.size());
  }
  return SparseMatrix(m, n, std::move(colptr), std::move(rowind),
                      std::move(values));
}

} // namespace

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  return spgemm(a, b, true);
}

SparseMatrix pattern_product(const SparseMatrix& a, const SparseMatrix& b) {
  return spgemm(a, b, false);
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha,
                 double beta) {
  if (a.nrows() != b.nrows() || a.ncols() != b.ncols())
    throw DimensionError("add: shape mismatch");
  const Index n = a.ncols();
  std::vector<Index> colptr(n + 1, 0);
  std::vector<Index> rowind;
  std::vector<double> values;
  rowind.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  for (Index j = 0; j < n; ++j) {
    Index pa = a.col_begin(j), pb = b.col_begin(j);
    const Index ea = a.col_end(j), eb = b.col_end(j);
    while (pa < ea || pb < eb) {
      Index i;
      double v;
      if (pb >= eb || (pa < ea && a.row_at(pa) < b.row_at(pb))) {
        i = a.row_at(pa);
        v = alpha * a.value_at(pa++);
      } else if (pa >= ea || b.row_at(pb) < a.row_at(pa)) {
        i = b.row_at(pb);
        v = beta * b.value_at(pb++);
      } else {
        i = a.row_at(pa);
        v = alpha * a.value_at(pa++) + beta * b.value_at(pb++);
      }
      rowind.push_back(i);
      values.push_back(v);
    }
    colptr[j + 1] = static_cast<Index>(rowind.size());
  }
  return SparseMatrix(a.nrows(), n, std::move(colptr), std::move(rowind),
                      std::move(values));
}

SparseMatrix permute_symmetric(const SparseMatrix& a,
                               std::span<const Index> perm) {
  if (!a.square() || static_cast<Index>(perm.size()) != a.nrows())
    throw DimensionError("permute_symmetric: bad arguments");
  const Index n = a.nrows();
  std::vector<Index> inv(n);
  for (Index i = 0; i < n; ++i)
    inv[perm[i]] = i;
  std::vector<Triplet> trips;
  trips.reserve(a.nnz());
  for (Index j = 0; j < n; ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      trips.push_back({inv[a.row_at(p)], inv[j], a.value_at(p)});
  return SparseMatrix::from_triplets(n, n, trips);
}

SparseMatrix permute_rows(const SparseMatrix& a, std::span<const Index> perm) {
  if (static_cast<Index>(perm.size()) != a.nrows())
    throw DimensionError("permute_rows: bad permutation length");
  const Index m = a.nrows();
  std::vector<Index> inv(m);
  for (Index i = 0; i < m; ++i)
    inv[perm[i]] = i;
  std::vector<Triplet> trips;
  trips.reserve(a.nnz());
  for (Index j = 0; j < a.ncols(); ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      trips.push_back({inv[a.row_at(p)], j, a.value_at(p)});
  return SparseMatrix::from_triplets(m, a.ncols(), trips);
}

SparseMatrix scale(const SparseMatrix& a, std::span<const double> dr,
                   std::span<const double> dc) {
  if (static_cast<Index>(dr.size()) != a.nrows() ||
      static_cast<Index>(dc.size()) != a.ncols())
    throw DimensionError("scale: diagonal length mismatch");
  std::vector<Index> colptr(a.colptr().begin(), a.colptr().end());
  std::vector<Index> rowind(a.rowind().begin(), a.rowind().end());
  std::vector<double> values(a.values().begin(), a.values().end());
  for (Index j = 0; j < a.ncols(); ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      values[p] *= dr[rowind[p]] * dc[j];
  return SparseMatrix(a.nrows(), a.ncols(), std::move(colptr),
                      std::move(rowind), std::move(values));
}

double frobenius_norm(const SparseMatrix& a) {
  double s = 0.0;
  for (double v : a.values())
    s += v * v;
  return std::sqrt(s);
}

std::vector<double> diagonal(const SparseMatrix& a) {
  const Index n = std::min(a.nrows(), a.ncols());
  std::vector<double> d(n, 0.0);
  for (Index j = 0; j < n; ++j)
    d[j] = a.coeff(j, j);
  return d;
}

SparseMatrix prune_exact_zeros(const SparseMatrix& a) {
  std::vector<Index> colptr(a.ncols() + 1, 0);
  std::vector<Index> rowind;
  std::vector<double> values;
  for (Index j = 0; j < a.ncols(); ++j) {
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      if (a.value_at(p) != 0.0) {
        rowind.push_back(a.row_at(p));
        values.push_back(a.value_at(p));
      }
    colptr[j + 1] = static_cast<Index>(rowind.size());
  }
  return SparseMatrix(a.nrows(), a.ncols(), std::move(colptr),
                      std::move(rowind), std::move(values));
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size())
    throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += alpha * x[i];
}

} // namespace skewprec
