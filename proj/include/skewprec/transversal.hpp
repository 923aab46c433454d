#pragma once

#include <span>
#include <vector>

#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

/// Maximum-product transversal with dual potentials. `perm[j]` is the row
/// matched to column j; the duals certify optimality through
/// log(maxcol_j) - log|a_ij| >= u_i + v_j with equality on matched entries.
struct MatchingResult {
  std::vector<Index> perm;
  std::vector<double> row_duals; // u, indexed by row of A
  std::vector<double> col_duals; // v, indexed by column of A
};

/// Finds a permutation maximizing the product of matched magnitudes.
/// Throws StructurallySingularError when no full transversal exists.
MatchingResult max_product_transversal(const SparseMatrix& a);

/// The scaled and permuted system Abar = P D_r A D_c, with the matched
/// entries moved to the diagonal at modulus exactly 1.
struct ScaledSystem {
  std::vector<Index> perm;       // source row at position i
  std::vector<double> row_scale; // D_r, indexed by source row
  std::vector<double> col_scale; // D_c, indexed by column
  SparseMatrix scaled;           // Abar

  /// bhat = P D_r b.
  std::vector<double> transform_rhs(std::span<const double> b) const;
  /// x = D_c xhat.
  std::vector<double> recover_solution(std::span<const double> xhat) const;
};

ScaledSystem apply_transversal(const SparseMatrix& a,
                               const MatchingResult& matching);

} // namespace skewprec
