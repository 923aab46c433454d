#pragma once

#include <optional>
#include <span>
#include <vector>

#include "skewprec/dense.hpp"
#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

/// Abstract real linear operator with a skew-symmetric action.
class SkewLinOp {
public:
  virtual ~SkewLinOp() = default;
  virtual Index dim() const = 0;
  /// y = J x. `y` is overwritten.
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
};

/// Rank-k correction Q S_k Q^T subtracted from a skew operator. S_k is the
/// skew tridiagonal with +alphas on the superdiagonal, -alphas below.
struct DeflationCorrection {
  DenseMatrix q;              // n x k, orthonormal columns
  std::vector<double> alphas; // length k-1, all positive
};

/// y = S_k c for the tridiagonal encoded by `alphas`.
std::vector<double> apply_skew_tridiagonal(std::span<const double> alphas,
                                           std::span<const double> c);

/// Skew-symmetric matrix stored as its strict upper triangle U, acting as
/// J = U - U^T, with an optional deflation correction J - Q S_k Q^T.
class SkewOperator final : public SkewLinOp {
public:
  SkewOperator() = default;

  /// `strict_upper` must be square with no entries on or below the diagonal.
  explicit SkewOperator(SparseMatrix strict_upper);

  Index dim() const override { return upper_.nrows(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

  const SparseMatrix& strict_upper() const { return upper_; }

  bool has_correction() const { return correction_.has_value(); }
  const DeflationCorrection& correction() const { return *correction_; }
  void set_correction(DeflationCorrection c);

  /// Materializes U - U^T (correction not included).
  SparseMatrix to_full() const;

  /// Stored entries of the strict upper triangle.
  Index upper_nnz() const { return upper_.nnz(); }

private:
  SparseMatrix upper_;
  std::optional<DeflationCorrection> correction_;
};

/// Splits a square A into its symmetric part (A + A^T)/2 as a SparseMatrix
/// and its skew part (A - A^T)/2 as a SkewOperator.
std::pair<SparseMatrix, SkewOperator> split_sym_skew(const SparseMatrix& a);

} // namespace skewprec
