#pragma once

#include <vector>

#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

/// Reverse Cuthill-McKee ordering of the undirected graph of
/// pattern + pattern^T (self loops ignored). Starts each component from a
/// pseudo-peripheral vertex found by repeated BFS. Returns `order` with
/// order[i] = original vertex placed at position i.
std::vector<Index> rcm_order(const SparseMatrix& pattern);

/// Half bandwidth max_{a_ij != 0} |i - j| of the reordered matrix; helper
/// for evaluating orderings.
Index bandwidth(const SparseMatrix& a);

} // namespace skewprec
