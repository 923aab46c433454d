#pragma once

#include <span>
#include <vector>

#include "skewprec/types.hpp"

namespace skewprec {

/// Column-major dense matrix; small sizes only (Krylov bases, SMW cores).
class DenseMatrix {
public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(Index rows, Index cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows * cols), 0.0) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  double& operator()(Index i, Index j) { return data_[j * rows_ + i]; }
  double operator()(Index i, Index j) const { return data_[j * rows_ + i]; }

  std::span<double> col(Index j) {
    return std::span<double>(data_.data() + j * rows_,
                             static_cast<std::size_t>(rows_));
  }
  std::span<const double> col(Index j) const {
    return std::span<const double>(data_.data() + j * rows_,
                                   static_cast<std::size_t>(rows_));
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  static DenseMatrix identity(Index n);

private:
  Index rows_;
  Index cols_;
  std::vector<double> data_;
};

/// y = M x.
std::vector<double> dense_matvec(const DenseMatrix& m,
                                 std::span<const double> x);

/// y = M^T x.
std::vector<double> dense_matvec_transpose(const DenseMatrix& m,
                                           std::span<const double> x);

/// LU factorization with partial pivoting, for the small SMW core.
class DenseLu {
public:
  explicit DenseLu(DenseMatrix m);

  bool singular() const { return singular_; }

  /// Solves M x = b; throws SolverError when the factor is singular.
  std::vector<double> solve(std::span<const double> b) const;

private:
  DenseMatrix lu_;
  std::vector<Index> piv_;
  bool singular_ = false;
};

} // namespace skewprec
