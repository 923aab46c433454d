#include "skewprec/transversal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace skewprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

MatchingResult max_product_transversal(const SparseMatrix& a) {
  if (!a.square())
    throw DimensionError("max_product_transversal: matrix not square");
  const Index n = a.nrows();

  // Entry costs log(maxcol_j) - log|a_ij| are nonnegative and zero at each
  // column maximum; stored zeros are treated as absent.
  std::vector<double> logmax(n, -kInf);
  for (Index j = 0; j < n; ++j) {
    double m = 0.0;
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      m = std::max(m, std::abs(a.value_at(p)));
    if (m == 0.0)
      throw StructurallySingularError(
          "max_product_transversal: column " + std::to_string(j) +
          " has no nonzero entries");
    logmax[j] = std::log(m);
  }
  std::vector<double> cost(a.nnz(), kInf);
  for (Index j = 0; j < n; ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      if (a.value_at(p) != 0.0)
        cost[p] = logmax[j] - std::log(std::abs(a.value_at(p)));

  std::vector<double> u(n, 0.0), v(n, 0.0);
  std::vector<Index> match_row(n, -1); // column matched to row, or -1
  std::vector<Index> match_col(n, -1); // row matched to column, or -1

  // Cheap pass: match each column at one of its maxima when the row is free.
  for (Index j = 0; j < n; ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      if (cost[p] == 0.0 && match_row[a.row_at(p)] == -1) {
        match_row[a.row_at(p)] = j;
        match_col[j] = a.row_at(p);
        break;
      }

  // One shortest augmenting path per unmatched column, Dijkstra on reduced
  // costs c_ij - u_i - v_j, which stay nonnegative throughout.
  std::vector<double> dist(n);
  std::vector<Index> prev_col(n);
  std::vector<char> finalized(n);
  std::vector<double> dcol(n);
  std::vector<Index> scanned_cols, finalized_rows;
  using HeapItem = std::pair<double, Index>;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;

  for (Index j0 = 0; j0 < n; ++j0) {
    if (match_col[j0] != -1)
      continue;
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(finalized.begin(), finalized.end(), 0);
    scanned_cols.clear();
    finalized_rows.clear();
    while (!heap.empty())
      heap.pop();

    auto scan_column = [&](Index j, double dj) {
      dcol[j] = dj;
      scanned_cols.push_back(j);
      for (Index p = a.col_begin(j); p < a.col_end(j); ++p) {
        if (cost[p] == kInf)
          continue;
        const Index i = a.row_at(p);
        if (finalized[i])
          continue;
        // Reduced costs are nonnegative in exact arithmetic; clamp the few
        // ulps of drift so Dijkstra's invariant holds.
        const double nd = dj + std::max(0.0, cost[p] - u[i] - v[j]);
        if (nd < dist[i]) {
          dist[i] = nd;
          prev_col[i] = j;
          heap.push({nd, i});
        }
      }
    };

    scan_column(j0, 0.0);
    Index endrow = -1;
    double shortest = kInf;
    while (!heap.empty()) {
      auto [d, i] = heap.top();
      heap.pop();
      if (finalized[i])
        continue;
      finalized[i] = 1;
      finalized_rows.push_back(i);
      if (match_row[i] == -1) {
        endrow = i;
        shortest = d;
        break;
      }
      scan_column(match_row[i], d);
    }
    if (endrow == -1)
      throw StructurallySingularError(
          "max_product_transversal: no augmenting path for column " +
          std::to_string(j0));

    // Dual update keeps reduced costs nonnegative and makes every edge on
    // the augmenting path tight.
    for (Index i : finalized_rows)
      u[i] += dist[i] - shortest;
    for (Index j : scanned_cols)
      v[j] += shortest - dcol[j];

    // Flip the path, rewiring each displaced row to its predecessor column.
    Index i = endrow;
    while (true) {
      const Index j = prev_col[i];
      const Index displaced = match_col[j];
      match_col[j] = i;
      match_row[i] = j;
      if (j == j0)
        break;
      i = displaced;
    }
  }

  MatchingResult r;
  r.perm = std::move(match_col);
  r.row_duals = std::move(u);
  r.col_duals = std::move(v);
  // Fold the column maxima into the column duals so that the scalings are
  // exp(u) and exp(v) directly.
  for (Index j = 0; j < n; ++j)
    r.col_duals[j] -= logmax[j];
  return r;
}

ScaledSystem apply_transversal(const SparseMatrix& a,
                               const MatchingResult& matching) {
  const Index n = a.nrows();
  if (!a.square() || static_cast<Index>(matching.perm.size()) != n)
    throw DimensionError("apply_transversal: bad arguments");

  ScaledSystem s;
  s.perm = matching.perm;
  s.row_scale.resize(n);
  s.col_scale.resize(n);
  for (Index i = 0; i < n; ++i)
    s.row_scale[i] = std::exp(matching.row_duals[i]);
  for (Index j = 0; j < n; ++j)
    s.col_scale[j] = std::exp(matching.col_duals[j]);

  // Pin the matched entries to modulus exactly one; the duals put them
  // there already up to floating-point drift.
  for (Index j = 0; j < n; ++j) {
    const Index i = s.perm[j];
    const double scaled = std::abs(s.row_scale[i] * a.coeff(i, j) *
                                   s.col_scale[j]);
    if (scaled == 0.0)
      throw StructurallySingularError(
          "apply_transversal: matched entry is zero");
    s.row_scale[i] /= scaled;
  }

  s.scaled = permute_rows(scale(a, s.row_scale, s.col_scale), s.perm);
  return s;
}

std::vector<double>
ScaledSystem::transform_rhs(std::span<const double> b) const {
  const Index n = static_cast<Index>(perm.size());
  if (static_cast<Index>(b.size()) != n)
    throw DimensionError("transform_rhs: size mismatch");
  std::vector<double> out(n);
  for (Index i = 0; i < n; ++i)
    out[i] = row_scale[perm[i]] * b[perm[i]];
  return out;
}

std::vector<double>
ScaledSystem::recover_solution(std::span<const double> xhat) const {
  const Index n = static_cast<Index>(perm.size());
  if (static_cast<Index>(xhat.size()) != n)
    throw DimensionError("recover_solution: size mismatch");
  std::vector<double> out(n);
  for (Index j = 0; j < n; ++j)
    out[j] = col_scale[j] * xhat[j];
  return out;
}

} // namespace skewprec
