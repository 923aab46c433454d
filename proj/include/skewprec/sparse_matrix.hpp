#pragma once

#include <span>
#include <utility>
#include <vector>

#include "skewprec/types.hpp"

namespace skewprec {

/// One explicit entry of a sparse matrix in coordinate form.
struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Compressed sparse column matrix. Row indices within each column are
/// strictly increasing; explicitly stored zeros are kept.
class SparseMatrix {
public:
  SparseMatrix() : nrows_(0), ncols_(0), colptr_(1, 0) {}

  SparseMatrix(Index nrows, Index ncols, std::vector<Index> colptr,
               std::vector<Index> rowind, std::vector<double> values);

  /// Builds from coordinate entries; duplicates are summed.
  static SparseMatrix from_triplets(Index nrows, Index ncols,
                                    std::span<const Triplet> entries);

  static SparseMatrix identity(Index n);

  Index nrows() const { return nrows_; }
  Index ncols() const { return ncols_; }
  Index nnz() const { return static_cast<Index>(rowind_.size()); }
  bool square() const { return nrows_ == ncols_; }

  std::span<const Index> colptr() const { return colptr_; }
  std::span<const Index> rowind() const { return rowind_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  Index col_begin(Index j) const { return colptr_[j]; }
  Index col_end(Index j) const { return colptr_[j + 1]; }
  Index row_at(Index p) const { return rowind_[p]; }
  double value_at(Index p) const { return values_[p]; }

  /// Value at (i, j); zero when the entry is not stored. Binary search.
  double coeff(Index i, Index j) const;

private:
  Index nrows_;
  Index ncols_;
  std::vector<Index> colptr_;
  std::vector<Index> rowind_;
  std::vector<double> values_;
};

SparseMatrix transpose(const SparseMatrix& a);

/// y = A x.
std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);

/// y += alpha * A x. `y` must already have a.nrows() entries.
void spmv_add(const SparseMatrix& a, std::span<const double> x,
              std::span<double> y, double alpha = 1.0);

/// C = A B with numeric cancellation kept (no entry pruning).
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// Pattern of A B: every structurally reachable entry, all values 1.
SparseMatrix pattern_product(const SparseMatrix& a, const SparseMatrix& b);

/// alpha * A + beta * B.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b,
                 double alpha = 1.0, double beta = 1.0);

/// B(i, j) = A(perm[i], perm[j]) for a square A.
SparseMatrix permute_symmetric(const SparseMatrix& a,
                               std::span<const Index> perm);

/// B(i, j) = A(perm[i], j).
SparseMatrix permute_rows(const SparseMatrix& a, std::span<const Index> perm);

/// Row scaling then column scaling: B = diag(dr) * A * diag(dc).
SparseMatrix scale(const SparseMatrix& a, std::span<const double> dr,
                   std::span<const double> dc);

double frobenius_norm(const SparseMatrix& a);

/// Main diagonal as a dense vector (length min(nrows, ncols)).
std::vector<double> diagonal(const SparseMatrix& a);

/// Drops entries with |value| == 0 is NOT done anywhere implicitly; this
/// helper exists for callers that explicitly want a pruned copy.
SparseMatrix prune_exact_zeros(const SparseMatrix& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += alpha * x.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

} // namespace skewprec
