#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "skewprec/dense.hpp"
#include "skewprec/sparse_matrix.hpp"
#include "skewprec/skew_operator.hpp"

namespace testutil {

using skewprec::Index;
using skewprec::SparseMatrix;
using skewprec::Triplet;

using Rng = std::mt19937_64;

inline std::vector<double> random_vector(Index n, Rng& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v)
    x = dist(rng);
  return v;
}

/// Random sparse matrix with roughly `per_col` entries per column; when
/// `unit_diagonal_shift` is set the diagonal additionally receives `shift`
/// so the matrix is nonsingular with high probability.
inline SparseMatrix random_sparse(Index nrows, Index ncols, Index per_col,
                                  Rng& rng, double diag_shift = 0.0) {
  std::uniform_int_distribution<Index> row(0, nrows - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Triplet> trips;
  for (Index j = 0; j < ncols; ++j)
    for (Index t = 0; t < per_col; ++t)
      trips.push_back({row(rng), j, val(rng)});
  if (diag_shift != 0.0)
    for (Index j = 0; j < std::min(nrows, ncols); ++j)
      trips.push_back({j, j, diag_shift});
  return SparseMatrix::from_triplets(nrows, ncols, trips);
}

/// Random symmetric matrix (A + A^T) with an optional diagonal shift.
inline SparseMatrix random_symmetric(Index n, Index per_col, Rng& rng,
                                     double diag_shift = 0.0) {
  SparseMatrix a = random_sparse(n, n, per_col, rng);
  SparseMatrix s = skewprec::add(a, skewprec::transpose(a), 0.5, 0.5);
  if (diag_shift == 0.0)
    return s;
  return skewprec::add(s, SparseMatrix::identity(n), 1.0, diag_shift);
}

/// Random strict upper triangle with about `per_col` entries per column.
inline SparseMatrix random_strict_upper(Index n, Index per_col, Rng& rng) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Triplet> trips;
  for (Index j = 1; j < n; ++j) {
    std::uniform_int_distribution<Index> row(0, j - 1);
    const Index cnt = std::min<Index>(per_col, j);
    for (Index t = 0; t < cnt; ++t)
      trips.push_back({row(rng), j, val(rng)});
  }
  return SparseMatrix::from_triplets(n, n, trips);
}

/// Structurally nonsingular random square matrix: random entries plus a
/// randomly permuted "diagonal" of safely large values.
inline SparseMatrix random_structurally_nonsingular(Index n, Index per_col,
                                                    Rng& rng,
                                                    double diag_lo = 1.0,
                                                    double diag_hi = 2.0) {
  SparseMatrix a = random_sparse(n, n, per_col, rng);
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i)
    perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> mag(diag_lo, diag_hi);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<Triplet> trips;
  for (Index j = 0; j < n; ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      trips.push_back({a.row_at(p), j, a.value_at(p)});
  for (Index j = 0; j < n; ++j)
    trips.push_back({perm[j], j, (sign(rng) ? 1.0 : -1.0) * mag(rng)});
  return SparseMatrix::from_triplets(n, n, trips);
}

/// Materializes any linear operator by probing with unit vectors.
inline Eigen::MatrixXd dense_operator(const skewprec::SkewLinOp& op) {
  const Index n = op.dim();
  Eigen::MatrixXd d(n, n);
  std::vector<double> e(n, 0.0), y(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, y);
    for (Index i = 0; i < n; ++i)
      d(i, j) = y[i];
    e[j] = 0.0;
  }
  return d;
}

inline Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.nrows(), a.ncols());
  for (Index j = 0; j < a.ncols(); ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      d(a.row_at(p), j) = a.value_at(p);
  return d;
}

inline Eigen::MatrixXd to_dense(const skewprec::DenseMatrix& a) {
  Eigen::MatrixXd d(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      d(i, j) = a(i, j);
  return d;
}

inline SparseMatrix from_dense(const Eigen::MatrixXd& d,
                               double drop_tol = 0.0) {
  std::vector<Triplet> trips;
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i)
      if (std::abs(d(i, j)) > drop_tol)
        trips.push_back({i, j, d(i, j)});
  return SparseMatrix::from_triplets(d.rows(), d.cols(), trips);
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  Eigen::VectorXd e(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    e(i) = v[i];
  return e;
}

inline std::vector<double> from_eigen(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double max_abs_diff(std::span<const double> a,
                           std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace testutil
