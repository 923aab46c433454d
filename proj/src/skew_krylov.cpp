#include "skewprec/skew_krylov.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

LanczosBasis skew_lanczos(const SkewLinOp& op, std::span<const double> start,
                          Index k) {
  const Index n = op.dim();
  if (Index(start.size()) != n) {
    throw DimensionError("skew_lanczos: start vector size mismatch");
  }
  if (k < 1) {
    throw DimensionError("skew_lanczos: at least one vector is required");
  }
  k = std::min(k, n);

  std::vector<std::vector<double>> qs;
  std::vector<double> alphas;
  std::vector<double> q1(start.begin(), start.end());
  const double nrm = norm2(q1);
  if (nrm == 0.0) {
    throw DimensionError("skew_lanczos: start vector is zero");
  }
  for (double& v : q1) {
    v /= nrm;
  }
  qs.push_back(std::move(q1));

  std::vector<double> z(n);
  while (Index(qs.size()) < k) {
    op.apply(qs.back(), z);
    if (qs.size() >= 2) {
      axpy(-alphas.back(), qs[qs.size() - 2], z);
    }
    const double a = norm2(z);
    if (a == 0.0) {
      break;
    }
    alphas.push_back(a);
    std::vector<double> next(n);
    for (Index i = 0; i < n; ++i) {
      next[i] = -z[i] / a;
    }
    qs.push_back(std::move(next));
  }

  LanczosBasis out;
  out.q = DenseMatrix(n, Index(qs.size()));
  for (Index j = 0; j < Index(qs.size()); ++j) {
    std::copy(qs[j].begin(), qs[j].end(), out.q.col(j).begin());
  }
  out.alphas = std::move(alphas);
  return out;
}

LanczosBasis skew_lanczos(const SkewLinOp& op, Index k) {
  std::vector<double> ones(op.dim(), 1.0);
  return skew_lanczos(op, ones, k);
}

DeflationCorrection make_deflation(const LanczosBasis& basis) {
  return DeflationCorrection{basis.q, basis.alphas};
}

MrsResult mrs_solve(const SkewLinOp& op, double alpha, const DenseMatrix& b,
                    double tol, Index maxit) {
  const Index n = op.dim();
  if (b.rows() != n) {
    throw DimensionError("mrs_solve: right-hand side size mismatch");
  }
  const Index nrhs = b.cols();

  MrsResult out;
  out.x = DenseMatrix(n, nrhs);
  out.estimates.assign(nrhs, 0.0);
  out.true_residuals.assign(nrhs, 0.0);
  out.histories.assign(nrhs, {});

  std::vector<double> r0(nrhs, 0.0), s(nrhs, 0.0), beta(nrhs, 0.0);
  std::vector<double> theta1(nrhs, alpha), c_old(nrhs, 1.0), s_old(nrhs, 0.0);
  std::vector<double> delta(nrhs, 0.0), delta_old(nrhs, 0.0);
  std::vector<double> c_k(nrhs, 0.0), s_k(nrhs, 0.0);
  std::vector<char> alive(nrhs, 0);

  DenseMatrix q(n, nrhs), q_old(n, nrhs), q_new(n, nrhs);
  DenseMatrix p(n, nrhs), p_old(n, nrhs), p_old2(n, nrhs);

  Index n_alive = 0;
  for (Index j = 0; j < nrhs; ++j) {
    r0[j] = norm2(b.col(j));
    if (r0[j] == 0.0) {
      out.histories[j].push_back(0.0);
      continue;
    }
    alive[j] = 1;
    ++n_alive;
    out.histories[j].push_back(1.0);
    s[j] = r0[j];
    auto qc = q.col(j);
    for (Index i = 0; i < n; ++i) {
      qc[i] = b(i, j) / s[j];
    }
  }
  if (n_alive == 0) {
    out.converged = true;
    return out;
  }

  std::vector<double> jq(n);
  for (Index it = 1; it <= maxit; ++it) {
    double max_est = 0.0;
    for (Index j = 0; j < nrhs; ++j) {
      if (!alive[j]) {
        out.histories[j].push_back(0.0);
        continue;
      }
      op.apply(q.col(j), jq);
      auto qn = q_new.col(j);
      auto qo = q_old.col(j);
      for (Index i = 0; i < n; ++i) {
        qn[i] = jq[i] + qo[i] * beta[j];
      }
      std::copy(q.col(j).begin(), q.col(j).end(), qo.begin());

      beta[j] = norm2(qn);
      if (beta[j] != 0.0) {
        auto qc = q.col(j);
        for (Index i = 0; i < n; ++i) {
          qc[i] = qn[i] / beta[j];
        }
      }
      const double theta = std::hypot(theta1[j], beta[j]);
      if (theta == 0.0) {
        throw SolverError("mrs_solve: zero rotation, alpha and the recurrence "
                          "both vanished");
      }
      c_k[j] = theta1[j] / theta;
      s_k[j] = beta[j] / theta;
      delta[j] = -s_old[j] * beta[j];
      theta1[j] = c_old[j] * theta;

      auto pc = p.col(j);
      auto po2 = p_old2.col(j);
      for (Index i = 0; i < n; ++i) {
        pc[i] = (qo[i] - po2[i] * delta_old[j]) / theta;
      }
      axpy(s[j] * c_k[j], pc, out.x.col(j));
      s[j] = -s[j] * s_k[j];

      const double est = std::abs(s[j]) / r0[j];
      out.histories[j].push_back(est);
      max_est = std::max(max_est, est);
    }
    out.iterations = it;
    if (max_est < tol) {
      out.converged = true;
      break;
    }
    for (Index j = 0; j < nrhs; ++j) {
      if (!alive[j]) {
        continue;
      }
      std::copy(p_old.col(j).begin(), p_old.col(j).end(),
                p_old2.col(j).begin());
      std::copy(p.col(j).begin(), p.col(j).end(), p_old.col(j).begin());
      s_old[j] = s_k[j];
      c_old[j] = c_k[j];
      delta_old[j] = delta[j];
    }
  }

  for (Index j = 0; j < nrhs; ++j) {
    if (alive[j]) {
      out.estimates[j] = std::abs(s[j]) / r0[j];
    }
    op.apply(out.x.col(j), jq);
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double ri = b(i, j) - alpha * out.x(i, j) - jq[i];
      acc += ri * ri;
    }
    out.true_residuals[j] = std::sqrt(acc);
  }
  return out;
}

MrsResult mrs_solve(const SkewLinOp& op, double alpha,
                    std::span<const double> b, double tol, Index maxit) {
  DenseMatrix bm(Index(b.size()), 1);
  std::copy(b.begin(), b.end(), bm.col(0).begin());
  return mrs_solve(op, alpha, bm, tol, maxit);
}

} // namespace skewprec
