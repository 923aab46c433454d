#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "skewprec/dense.hpp"
#include "skewprec/ildl.hpp"
#include "skewprec/skew_krylov.hpp"
#include "skewprec/skew_operator.hpp"
#include "skewprec/skew_symmetrizer.hpp"
#include "skewprec/sparse_matrix.hpp"
#include "skewprec/types.hpp"

namespace skewprec {

enum class SolveStatus { converged, maxit, stagnated, breakdown };

const char* to_string(SolveStatus s);

/// y = A x for an operator that is only available as an action.
using LinOp = std::function<void(std::span<const double>, std::span<double>)>;

struct TfqmrOptions {
  double tol = 1e-5;
  Index maxit = 2000;
};

/// history holds the relative quasi-residual bound tau * sqrt(m + 1) /
/// ||b|| per half step, starting at 1; relres is the true relative
/// residual of the returned iterate. iterations counts full sweeps, so it
/// ends in .5 when the first half step already satisfied the bound.
struct TfqmrResult {
  std::vector<double> x;
  SolveStatus status = SolveStatus::maxit;
  double iterations = 0.0;
  std::vector<double> history;
  double relres = 0.0;
};

/// Transpose-free QMR with an optional right preconditioner. Convergence is
/// declared only after the true residual of the candidate confirms the
/// quasi-residual bound within a factor of 10. Stagnation is flagged when
/// the bound stops improving (relative 1e-12) for 50 full sweeps, or on a
/// rho/sigma breakdown.
TfqmrResult tfqmr(Index n, const LinOp& op, std::span<const double> b,
                  const LinOp& right_precond, const TfqmrOptions& opt);

/// The skew part of the preprocessed system pushed through the incomplete
/// factor: J~ = scriptL^{-1} P J_hat P^T scriptL^{-T}, with an optional
/// deflation correction Q S_k Q^T subtracted.
class SandwichedSkewOp final : public SkewLinOp {
public:
  SandwichedSkewOp(const AbsFactor& af, const SkewOperator& j_hat)
      : af_(&af), j_hat_(&j_hat) {}

  Index dim() const override { return af_->l.ncols(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

  void set_correction(DeflationCorrection c) { correction_ = std::move(c); }
  bool has_correction() const { return correction_.has_value(); }

private:
  const AbsFactor* af_;
  const SkewOperator* j_hat_;
  std::optional<DeflationCorrection> correction_;
};

struct InnerStats {
  Index applications = 0;
  Index total_iterations = 0;
  double average() const {
    return applications == 0 ? 0.0
                             : double(total_iterations) / double(applications);
  }
};

/// P = S_bar + U_bar Sigma_bar U_bar^T with S_bar = I + J_bar, U_bar =
/// [Q_k, U_r] and Sigma_bar = blkdiag(S_k, -2 I_r). The inverse is applied
/// without inverting Sigma_bar:
///   P^{-1} v = t - X (I + Sigma_bar U_bar^T X)^{-1} Sigma_bar U_bar^T t,
/// where t = S_bar^{-1} v comes from one mrs solve and X = S_bar^{-1} U_bar
/// is precomputed once by a simultaneous mrs run at a tighter tolerance.
class TwoLevelPreconditioner {
public:
  TwoLevelPreconditioner(const SkewLinOp& j_bar, const LanczosBasis& basis,
                         const LowRankTerm& low_rank, double inner_tol,
                         Index inner_maxit);

  Index dim() const { return j_bar_->dim(); }
  std::vector<double> apply_inverse(std::span<const double> v) const;

  Index rank() const { return rank_; }
  Index lanczos_k() const { return k_; }
  Index setup_inner_iterations() const { return setup_inner_iterations_; }
  const InnerStats& stats() const { return stats_; }

private:
  const SkewLinOp* j_bar_;
  Index rank_ = 0;
  Index k_ = 0;
  std::vector<double> alphas_;
  DenseMatrix u_bar_;
  DenseMatrix x_;
  std::optional<DenseLu> core_;
  double inner_tol_;
  Index inner_maxit_;
  Index setup_inner_iterations_ = 0;
  mutable InnerStats stats_;

  std::vector<double> apply_sigma(std::span<const double> v) const;
};

struct TwoLevelOptions {
  SymmetrizerPattern pattern = SymmetrizerPattern::tridiagonal;
  double gamma = 1.0;
  IldlVariant ildl = IldlVariant::nofill();
  Index lanczos_k = 20;
  double tol = 1e-5;
  Index maxit = 2000;
  double inner_tol = 1e-5;
  Index inner_maxit = 0; // 0 picks the problem dimension
};

struct TwoLevelReport {
  std::vector<double> x;
  SolveStatus status = SolveStatus::maxit;
  double outer_iterations = 0.0;
  std::vector<double> outer_history;
  double relres = 0.0;          // on the input system A x = b
  double relres_modified = 0.0; // on the sandwiched system the solver saw
  Index rank = 0;
  Index lanczos_k = 0;
  Index pivot_2x2_count = 0;
  InnerStats inner;
  Index setup_inner_iterations = 0;
  double lls_objective = 0.0;
};

/// End-to-end solve of A x = b: skew-symmetrize, factor the symmetric
/// part, deflate, then run preconditioned tfqmr on the modified system and
/// map the iterate back to the original unknowns.
TwoLevelReport two_level_solve(const SparseMatrix& a, std::span<const double> b,
                               const TwoLevelOptions& opt);

} // namespace skewprec
