#pragma once

#include <span>
#include <vector>

#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

/// Dropping strategy of the incomplete LDL^T factorization. `nofill` keeps
/// at most as many entries per column as the original matrix column has
/// (largest magnitudes win); `threshold` keeps everything above
/// tau * ||column||_2 with unlimited fill. threshold(0) is the exact
/// factorization.
struct IldlVariant {
  enum class Kind { nofill, threshold };
  Kind kind = Kind::threshold;
  double tau = 0.0;

  static IldlVariant nofill() { return {Kind::nofill, 0.0}; }
  static IldlVariant threshold(double tau) {
    return {Kind::threshold, tau};
  }
  static IldlVariant exact() { return threshold(0.0); }
};

/// One diagonal pivot block of the factorization: 1x1 holds `a`, 2x2 holds
/// [[a, b], [b, c]] at positions (start, start+1).
struct PivotBlock {
  Index start = 0;
  Index size = 1;
  double a = 0.0, b = 0.0, c = 0.0;
};

/// P M P^T ~= L D L^T with unit lower triangular L (diagonal stored) and
/// block diagonal D; perm[pos] is the original index at factor position pos.
struct BlockLdlFactor {
  SparseMatrix l;
  std::vector<PivotBlock> d;
  std::vector<Index> perm;
  Index pivot_2x2_count = 0;
};

/// Left-looking incomplete factorization with Bunch-Kaufman-Parlett
/// pivoting (alpha = (1 + sqrt(17))/8). Throws FactorizationBreakdown when
/// a pivot block is exactly singular.
BlockLdlFactor ildl_factor(const SparseMatrix& m, const IldlVariant& variant);

/// The absolute-value modification: scriptL = L * L_{|D|} so that
/// scriptL (I + M_r) scriptL^T = L D L^T, where M_r = L_{|D|}^{-1} D
/// L_{|D|}^{-T} - I is block diagonal with eigenvalues in {-2, 0} and rank
/// equal to the number of negative eigenvalues of D.
struct AbsFactor {
  SparseMatrix l;          // scriptL, lower triangular, diagonal stored
  std::vector<Index> perm; // same ordering as the input factor
  SparseMatrix m_r;        // remainder, exact block structure
  std::vector<Index> ind;  // rows carrying nonzero entries of m_r
  Index rank = 0;
};

AbsFactor abs_modify(const BlockLdlFactor& factor);

/// M_r = U Sigma U^T with orthonormal U (at most two entries per column)
/// and Sigma = -2 I_r, following the nonzero-index walk over
/// M_r(ind, ind).
struct LowRankTerm {
  SparseMatrix u;
  std::vector<double> sigma;
};

LowRankTerm low_rank_decompose(const SparseMatrix& m_r,
                               std::span<const Index> ind, Index rank);

/// y = scriptL^{-1} (P b).
std::vector<double> solve_with_l(const AbsFactor& f, std::span<const double> b);
/// x = P^T (scriptL^{-T} b).
std::vector<double> solve_with_lt(const AbsFactor& f,
                                  std::span<const double> b);

} // namespace skewprec
