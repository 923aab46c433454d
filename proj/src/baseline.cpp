#include "skewprec/baseline.hpp"

#include <algorithm>
#include <utility>

#include "skewprec/ordering.hpp"
#include "skewprec/transversal.hpp"

namespace skewprec {

IluFactor ilu0(const SparseMatrix& a) {
  if (!a.square()) {
    throw DimensionError("ilu0: matrix must be square");
  }
  const Index n = a.nrows();
  const SparseMatrix at = transpose(a);

  // Finished strictly-upper part of each U row, as (column, value) ascending.
  std::vector<std::vector<std::pair<Index, double>>> u_rows(n);
  std::vector<double> udiag(n, 0.0);
  std::vector<Triplet> l_trips, u_trips;
  std::vector<double> w(n, 0.0);
  std::vector<char> inrow(n, 0);
  std::vector<Index> cols;

  for (Index i = 0; i < n; ++i) {
    cols.clear();
    for (Index p = at.col_begin(i); p < at.col_end(i); ++p) {
      const Index j = at.row_at(p);
      w[j] = at.value_at(p);
      inrow[j] = 1;
      cols.push_back(j);
    }

    for (const Index k : cols) {
      if (k >= i) {
        break;
      }
      const double lik = w[k] / udiag[k];
      w[k] = lik;
      if (lik == 0.0) {
        continue;
      }
      for (const auto& [j, ukj] : u_rows[k]) {
        if (inrow[j]) {
          w[j] -= lik * ukj;
        }
      }
    }

    if (w[i] == 0.0 || !inrow[i]) {
      throw FactorizationBreakdown("ilu0: zero pivot", i);
    }
    udiag[i] = w[i];
    for (const Index j : cols) {
      if (j < i) {
        l_trips.push_back({i, j, w[j]});
      } else if (j == i) {
        u_trips.push_back({i, i, w[i]});
      } else {
        u_trips.push_back({i, j, w[j]});
        u_rows[i].push_back({j, w[j]});
      }
      w[j] = 0.0;
      inrow[j] = 0;
    }
    l_trips.push_back({i, i, 1.0});
  }

  IluFactor out;
  out.l = SparseMatrix::from_triplets(n, n, l_trips);
  out.u = SparseMatrix::from_triplets(n, n, u_trips);
  return out;
}

std::vector<double> ilu_solve(const IluFactor& f, std::span<const double> b) {
  const Index n = f.l.ncols();
  if (static_cast<Index>(b.size()) != n) {
    throw DimensionError("ilu_solve: right-hand side size mismatch");
  }
  std::vector<double> x(b.begin(), b.end());
  for (Index j = 0; j < n; ++j) {
    const double xj = x[j];
    if (xj == 0.0) {
      continue;
    }
    for (Index p = f.l.col_begin(j); p < f.l.col_end(j); ++p) {
      const Index i = f.l.row_at(p);
      if (i > j) {
        x[i] -= f.l.value_at(p) * xj;
      }
    }
  }
  for (Index j = n - 1; j >= 0; --j) {
    const Index last = f.u.col_end(j) - 1;
    if (last < f.u.col_begin(j) || f.u.row_at(last) != j) {
      throw SolverError("ilu_solve: factor is missing a diagonal entry");
    }
    x[j] /= f.u.value_at(last);
    const double xj = x[j];
    if (xj == 0.0) {
      continue;
    }
    for (Index p = f.u.col_begin(j); p < last; ++p) {
      x[f.u.row_at(p)] -= f.u.value_at(p) * xj;
    }
  }
  return x;
}

BaselineReport mps_rcm_solve(const SparseMatrix& a, std::span<const double> b,
                             const BaselineOptions& opt) {
  if (!a.square()) {
    throw DimensionError("mps_rcm_solve: matrix must be square");
  }
  const Index n = a.nrows();
  if (static_cast<Index>(b.size()) != n) {
    throw DimensionError("mps_rcm_solve: right-hand side size mismatch");
  }

  BaselineReport rep;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.x.assign(n, 0.0);
    rep.status = SolveStatus::converged;
    rep.history = {0.0};
    return rep;
  }

  const ScaledSystem sc = apply_transversal(a, max_product_transversal(a));
  const std::vector<Index> order = rcm_order(sc.scaled);
  const SparseMatrix reordered = permute_symmetric(sc.scaled, order);

  IluFactor f;
  try {
    f = ilu0(reordered);
  } catch (const FactorizationBreakdown&) {
    rep.x.assign(n, 0.0);
    rep.status = SolveStatus::breakdown;
    rep.history = {1.0};
    rep.relres = 1.0;
    rep.relres_scaled = 1.0;
    return rep;
  }

  const std::vector<double> b_hat = sc.transform_rhs(b);
  std::vector<double> b_perm(n);
  for (Index i = 0; i < n; ++i) {
    b_perm[i] = b_hat[order[i]];
  }

  const LinOp op = [&](std::span<const double> x, std::span<double> y) {
    const std::vector<double> t = spmv(reordered, x);
    std::copy(t.begin(), t.end(), y.begin());
  };
  const LinOp pinv = [&](std::span<const double> x, std::span<double> y) {
    const std::vector<double> t = ilu_solve(f, x);
    std::copy(t.begin(), t.end(), y.begin());
  };

  TfqmrResult res = tfqmr(n, op, b_perm, pinv, {opt.tol, opt.maxit});
  rep.status = res.status;
  rep.iterations = res.iterations;
  rep.history = std::move(res.history);
  rep.relres_scaled = res.relres;

  std::vector<double> x_hat(n);
  for (Index i = 0; i < n; ++i) {
    x_hat[order[i]] = res.x[i];
  }
  rep.x = sc.recover_solution(x_hat);

  std::vector<double> r(b.begin(), b.end());
  spmv_add(a, rep.x, r, -1.0);
  rep.relres = norm2(r) / bnorm;
  return rep;
}

} // namespace skewprec
