#include "skewprec/two_level.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace skewprec {

const char* to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::converged:
    return "converged";
  case SolveStatus::maxit:
    return "maxit";
  case SolveStatus::stagnated:
    return "stagnated";
  case SolveStatus::breakdown:
    return "breakdown";
  }
  return "unknown";
}

namespace {

double true_relres(Index n, const LinOp& op, std::span<const double> b,
                   std::span<const double> x, double bnorm) {
  std::vector<double> ax(n);
  op(x, ax);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double ri = b[i] - ax[i];
    acc += ri * ri;
  }
  return std::sqrt(acc) / bnorm;
}

} // namespace

TfqmrResult tfqmr(Index n, const LinOp& op, std::span<const double> b,
                  const LinOp& right_precond, const TfqmrOptions& opt) {
  if (Index(b.size()) != n) {
    throw DimensionError("tfqmr: right-hand side size mismatch");
  }

  TfqmrResult out;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    out.x.assign(n, 0.0);
    out.status = SolveStatus::converged;
    out.history = {0.0};
    return out;
  }

  auto to_x = [&](std::span<const double> zspace) {
    std::vector<double> x(zspace.begin(), zspace.end());
    if (right_precond) {
      right_precond(zspace, x);
    }
    return x;
  };
  auto apply = [&](std::span<const double> zspace, std::span<double> y) {
    if (right_precond) {
      std::vector<double> t(n);
      right_precond(zspace, t);
      op(t, y);
    } else {
      op(zspace, y);
    }
  };

  std::vector<double> z(n, 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> w = r, y1 = r;
  const std::vector<double> rs = r;
  std::vector<double> y2(n), u1(n), u2(n), v(n), d(n, 0.0);
  apply(y1, u1);
  v = u1;

  double tau = bnorm;
  double theta = 0.0;
  double eta = 0.0;
  double rho = dot(rs, r);

  out.history = {1.0};
  double best_bound = 1.0;
  Index last_improve = 0;
  Index half = 0;

  auto finish = [&](SolveStatus st, double iters) {
    out.status = st;
    out.iterations = iters;
    out.x = to_x(z);
    out.relres = true_relres(n, op, b, out.x, bnorm);
  };

  for (Index m = 1; m <= opt.maxit; ++m) {
    const double sigma = dot(rs, v);
    if (sigma == 0.0 || !std::isfinite(sigma)) {
      finish(SolveStatus::stagnated, double(m) - 1.0);
      return out;
    }
    const double alpha = rho / sigma;
    if (!std::isfinite(alpha)) {
      finish(SolveStatus::stagnated, double(m) - 1.0);
      return out;
    }
    for (Index i = 0; i < n; ++i) {
      y2[i] = y1[i] - alpha * v[i];
    }
    apply(y2, u2);

    for (int j = 0; j < 2; ++j) {
      const std::vector<double>& yj = j == 0 ? y1 : y2;
      const std::vector<double>& uj = j == 0 ? u1 : u2;
      axpy(-alpha, uj, w);
      ++half;

      const double theta_old = theta;
      const double eta_old = eta;
      theta = norm2(w) / tau;
      const double c = 1.0 / std::sqrt(1.0 + theta * theta);
      tau = tau * theta * c;
      eta = c * c * alpha;
      const double dscale = theta_old * theta_old * eta_old / alpha;
      for (Index i = 0; i < n; ++i) {
        d[i] = yj[i] + dscale * d[i];
      }
      axpy(eta, d, z);

      const double bound = tau * std::sqrt(double(half) + 1.0) / bnorm;
      out.history.push_back(bound);
      if (!std::isfinite(bound)) {
        finish(SolveStatus::stagnated, double(m) - 1.0 + 0.5 * (j + 1));
        return out;
      }
      if (bound < best_bound * (1.0 - 1e-12)) {
        best_bound = bound;
        last_improve = half;
      }

      if (bound <= opt.tol) {
        std::vector<double> xc = to_x(z);
        const double rel = true_relres(n, op, b, xc, bnorm);
        if (rel <= 10.0 * opt.tol) {
          out.status = SolveStatus::converged;
          out.iterations = double(m) - 1.0 + 0.5 * (j + 1);
          out.x = std::move(xc);
          out.relres = rel;
          return out;
        }
      }
      if (half - last_improve >= 100) {
        finish(SolveStatus::stagnated, double(m) - 1.0 + 0.5 * (j + 1));
        return out;
      }
    }

    const double rho_new = dot(rs, w);
    if (rho_new == 0.0 || !std::isfinite(rho_new)) {
      finish(SolveStatus::stagnated, double(m));
      return out;
    }
    const double beta = rho_new / rho;
    rho = rho_new;
    for (Index i = 0; i < n; ++i) {
      y1[i] = w[i] + beta * y2[i];
    }
    apply(y1, u1);
    for (Index i = 0; i < n; ++i) {
      v[i] = u1[i] + beta * (u2[i] + beta * v[i]);
    }
  }
  finish(SolveStatus::maxit, double(opt.maxit));
  return out;
}

void SandwichedSkewOp::apply(std::span<const double> x,
                             std::span<double> y) const {
  const std::vector<double> t = solve_with_lt(*af_, x);
  std::vector<double> u(dim());
  j_hat_->apply(t, u);
  const std::vector<double> w = solve_with_l(*af_, u);
  std::copy(w.begin(), w.end(), y.begin());
  if (correction_) {
    const DenseMatrix& q = correction_->q;
    const std::vector<double> c = dense_matvec_transpose(q, x);
    const std::vector<double> sc =
        apply_skew_tridiagonal(correction_->alphas, c);
    for (Index j = 0; j < q.cols(); ++j) {
      axpy(-sc[j], q.col(j), y);
    }
  }
}

TwoLevelPreconditioner::TwoLevelPreconditioner(const SkewLinOp& j_bar,
                                               const LanczosBasis& basis,
                                               const LowRankTerm& low_rank,
                                               double inner_tol,
                                               Index inner_maxit)
    : j_bar_(&j_bar), inner_tol_(inner_tol), inner_maxit_(inner_maxit) {
  const Index n = j_bar.dim();
  k_ = basis.q.cols();
  rank_ = low_rank.u.ncols();
  alphas_ = basis.alphas;

  const Index total = k_ + rank_;
  u_bar_ = DenseMatrix(n, total);
  for (Index j = 0; j < k_; ++j) {
    std::copy(basis.q.col(j).begin(), basis.q.col(j).end(),
              u_bar_.col(j).begin());
  }
  for (Index j = 0; j < rank_; ++j) {
    auto dst = u_bar_.col(k_ + j);
    for (Index p = low_rank.u.col_begin(j); p < low_rank.u.col_end(j); ++p) {
      dst[low_rank.u.row_at(p)] = low_rank.u.value_at(p);
    }
  }
  if (total == 0) {
    return;
  }

  MrsResult xr =
      mrs_solve(*j_bar_, 1.0, u_bar_, inner_tol_ * 1e-2, inner_maxit_);
  setup_inner_iterations_ = xr.iterations;
  x_ = std::move(xr.x);

  DenseMatrix g(total, total);
  for (Index j = 0; j < total; ++j) {
    const std::vector<double> hj = dense_matvec_transpose(u_bar_, x_.col(j));
    const std::vector<double> sh = apply_sigma(hj);
    for (Index i = 0; i < total; ++i) {
      g(i, j) = (i == j ? 1.0 : 0.0) + sh[i];
    }
  }
  core_.emplace(std::move(g));
  if (core_->singular()) {
    throw SolverError("two-level preconditioner: SMW core is singular");
  }
}

std::vector<double>
TwoLevelPreconditioner::apply_sigma(std::span<const double> v) const {
  std::vector<double> y(v.size(), 0.0);
  if (k_ > 0) {
    const std::vector<double> head(v.begin(), v.begin() + k_);
    const std::vector<double> sh = apply_skew_tridiagonal(alphas_, head);
    std::copy(sh.begin(), sh.end(), y.begin());
  }
  for (Index i = 0; i < rank_; ++i) {
    y[k_ + i] = -2.0 * v[k_ + i];
  }
  return y;
}

std::vector<double>
TwoLevelPreconditioner::apply_inverse(std::span<const double> v) const {
  const MrsResult t = mrs_solve(*j_bar_, 1.0, v, inner_tol_, inner_maxit_);
  ++stats_.applications;
  stats_.total_iterations += t.iterations;
  std::vector<double> out(t.x.col(0).begin(), t.x.col(0).end());
  if (!core_) {
    return out;
  }
  const std::vector<double> w = dense_matvec_transpose(u_bar_, out);
  const std::vector<double> sw = apply_sigma(w);
  const std::vector<double> zc = core_->solve(sw);
  for (Index j = 0; j < x_.cols(); ++j) {
    axpy(-zc[j], x_.col(j), out);
  }
  return out;
}

TwoLevelReport two_level_solve(const SparseMatrix& a, std::span<const double> b,
                               const TwoLevelOptions& opt) {
  if (!a.square()) {
    throw DimensionError("two_level_solve: matrix must be square");
  }
  if (Index(b.size()) != a.nrows()) {
    throw DimensionError("two_level_solve: right-hand side size mismatch");
  }
  const Index n = a.nrows();

  const SymmetrizedSystem sym = skew_symmetrize(a, opt.pattern, opt.gamma);
  const std::vector<double> b_hat = sym.transform_rhs(b);

  const auto [m_hat, j_hat] = split_sym_skew(sym.a_hat);
  const BlockLdlFactor factor = ildl_factor(m_hat, opt.ildl);
  const AbsFactor af = abs_modify(factor);
  const LowRankTerm lr = low_rank_decompose(af.m_r, af.ind, af.rank);

  const std::vector<double> b_tilde = solve_with_l(af, b_hat);

  SandwichedSkewOp j_tilde(af, j_hat);
  LanczosBasis basis;
  if (opt.lanczos_k > 0) {
    basis = skew_lanczos(j_tilde, opt.lanczos_k);
    j_tilde.set_correction(make_deflation(basis));
  }
  const Index inner_maxit = opt.inner_maxit > 0 ? opt.inner_maxit : n;
  const TwoLevelPreconditioner precond(j_tilde, basis, lr, opt.inner_tol,
                                       inner_maxit);

  const LinOp outer = [&](std::span<const double> x, std::span<double> y) {
    const std::vector<double> t = solve_with_lt(af, x);
    const std::vector<double> u = spmv(sym.a_hat, t);
    const std::vector<double> w = solve_with_l(af, u);
    std::copy(w.begin(), w.end(), y.begin());
  };
  const LinOp pinv = [&](std::span<const double> x, std::span<double> y) {
    const std::vector<double> t = precond.apply_inverse(x);
    std::copy(t.begin(), t.end(), y.begin());
  };

  TfqmrResult outer_res = tfqmr(n, outer, b_tilde, pinv, {opt.tol, opt.maxit});

  const std::vector<double> x_hat = solve_with_lt(af, outer_res.x);

  TwoLevelReport rep;
  rep.x = sym.recover_solution(x_hat);
  rep.status = outer_res.status;
  rep.outer_iterations = outer_res.iterations;
  rep.outer_history = std::move(outer_res.history);
  rep.relres_modified = outer_res.relres;
  rep.rank = af.rank;
  rep.lanczos_k = basis.q.cols();
  rep.pivot_2x2_count = factor.pivot_2x2_count;
  rep.inner = precond.stats();
  rep.setup_inner_iterations = precond.setup_inner_iterations();
  rep.lls_objective = sym.symmetrizer.objective_value;

  const double bnorm = norm2(b);
  std::vector<double> r(b.begin(), b.end());
  spmv_add(a, rep.x, r, -1.0);
  rep.relres = bnorm == 0.0 ? 0.0 : norm2(r) / bnorm;
  return rep;
}

} // namespace skewprec
