#include "skewprec/skew_symmetrizer.hpp"

#include <algorithm>
#include <cmath>

#include "skewprec/sparse_chol.hpp"

namespace skewprec {

namespace {

SparseMatrix make_s_pattern(const SparseMatrix& abar,
                            SymmetrizerPattern pattern) {
  const Index n = abar.nrows();
  switch (pattern) {
  case SymmetrizerPattern::diagonal:
    return SparseMatrix::identity(n);
  case SymmetrizerPattern::tridiagonal: {
    std::vector<Triplet> trips;
    trips.reserve(3 * n);
    for (Index j = 0; j < n; ++j) {
      if (j > 0)
        trips.push_back({j - 1, j, 1.0});
      trips.push_back({j, j, 1.0});
      if (j + 1 < n)
        trips.push_back({j + 1, j, 1.0});
    }
    return SparseMatrix::from_triplets(n, n, trips);
  }
  case SymmetrizerPattern::pattern_of_matrix: {
    std::vector<Index> colptr(abar.colptr().begin(), abar.colptr().end());
    std::vector<Index> rowind(abar.rowind().begin(), abar.rowind().end());
    std::vector<double> values(abar.nnz(), 1.0);
    return SparseMatrix(n, n, std::move(colptr), std::move(rowind),
                        std::move(values));
  }
  }
  throw SolverError("make_s_pattern: unknown pattern");
}

// Appends the coefficients of row `row`: for unknowns S(k, scol) the value
// weight * Abar(arow, k), merging row `arow` of Abar (a column of its
// transpose) against column `scol` of the S pattern.
void append_row(std::vector<Triplet>& out, Index row,
                const SparseMatrix& abar_t, const SparseMatrix& s_pat,
                Index arow, Index scol, double weight) {
  Index pa = abar_t.col_begin(arow);
  const Index ea = abar_t.col_end(arow);
  Index ps = s_pat.col_begin(scol);
  const Index es = s_pat.col_end(scol);
  while (pa < ea && ps < es) {
    const Index ka = abar_t.row_at(pa), ks = s_pat.row_at(ps);
    if (ka < ks)
      ++pa;
    else if (ks < ka)
      ++ps;
    else {
      const double coeff = weight * abar_t.value_at(pa);
      if (coeff != 0.0)
        out.push_back({row, ps, coeff}); // unknown index = storage position
      ++pa;
      ++ps;
    }
  }
}

} // namespace

LlsProblem build_lls(const SparseMatrix& abar, SymmetrizerPattern pattern,
                     double gamma) {
  if (!abar.square())
    throw DimensionError("build_lls: matrix not square");
  if (!(gamma > 0.0))
    throw SolverError("build_lls: gamma must be positive");
  const Index n = abar.nrows();

  LlsProblem problem;
  problem.gamma = gamma;
  problem.s_pattern = make_s_pattern(abar, pattern);
  const Index m = problem.s_pattern.nnz();

  const SparseMatrix abar_t = transpose(abar);
  SparseMatrix prod = pattern_product(abar, problem.s_pattern);
  SparseMatrix symprod = add(prod, transpose(prod), 1.0, 1.0);

  // Strict-upper pairs of the symmetrized product pattern, column-major.
  std::vector<std::pair<Index, Index>> pairs;
  for (Index j = 0; j < n; ++j)
    for (Index p = symprod.col_begin(j); p < symprod.col_end(j); ++p)
      if (symprod.row_at(p) < j)
        pairs.push_back({symprod.row_at(p), j});
  problem.skew_row_count = static_cast<Index>(pairs.size());

  const double sqrtg = std::sqrt(gamma);
  std::vector<Triplet> trips;
  trips.reserve(pairs.size() * 4 + abar.nnz());
  Index row = 0;
  for (auto [i, j] : pairs) {
    // (Abar S)_ij picks unknowns in column j, (Abar S)_ji in column i.
    append_row(trips, row, abar_t, problem.s_pattern, i, j, 1.0);
    append_row(trips, row, abar_t, problem.s_pattern, j, i, 1.0);
    ++row;
  }
  for (Index i = 0; i < n; ++i) {
    append_row(trips, row, abar_t, problem.s_pattern, i, i, sqrtg);
    ++row;
  }

  problem.b = SparseMatrix::from_triplets(row, m, trips);
  problem.rhs.assign(row, 0.0);
  for (Index i = 0; i < n; ++i)
    problem.rhs[pairs.size() + i] = sqrtg;
  return problem;
}

namespace {

// Plain conjugate gradients on the normal equations; returns false when the
// relative residual does not reach `tol` within `maxit`.
bool cg(const SparseMatrix& nmat, std::span<const double> rhs,
        std::vector<double>& x, double tol, Index maxit) {
  const Index m = nmat.nrows();
  x.assign(m, 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());
  const double bnorm = norm2(r);
  if (bnorm == 0.0)
    return true;
  std::vector<double> p = r, ap(m);
  double rr = dot(r, r);
  for (Index it = 0; it < maxit; ++it) {
    std::fill(ap.begin(), ap.end(), 0.0);
    spmv_add(nmat, p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0)
      return false;
    const double alpha = rr / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= tol * bnorm)
      return true;
    const double beta = rr_new / rr;
    rr = rr_new;
    for (Index i = 0; i < m; ++i)
      p[i] = r[i] + beta * p[i];
  }
  return false;
}

} // namespace

std::vector<double> solve_lls(const LlsProblem& problem) {
  const SparseMatrix bt = transpose(problem.b);
  const SparseMatrix nmat = multiply(bt, problem.b);
  const std::vector<double> rhs2 = spmv(bt, problem.rhs);
  const Index m = nmat.nrows();

  SparseCholesky chol = SparseCholesky::factor(nmat);
  if (chol.ok()) {
    std::vector<double> s = chol.solve(rhs2);
    // Semi-normal refinement against the original rectangular system.
    for (int step = 0; step < 3; ++step) {
      std::vector<double> resid(problem.rhs.begin(), problem.rhs.end());
      spmv_add(problem.b, s, resid, -1.0);
      std::vector<double> g = spmv(bt, resid);
      const std::vector<double> ds = chol.solve(g);
      axpy(1.0, ds, s);
    }
    return s;
  }

  std::vector<double> s;
  if (cg(nmat, rhs2, s, 1e-12, 10 * std::max<Index>(m, 1)))
    return s;
  throw RankDeficiencyError(
      "solve_lls: normal equations are numerically rank deficient near "
      "unknown " +
          std::to_string(chol.failed_column()),
      {chol.failed_column()});
}

SymmetrizedSystem skew_symmetrize(const SparseMatrix& a,
                                  SymmetrizerPattern pattern, double gamma) {
  SymmetrizedSystem out;
  const MatchingResult matching = max_product_transversal(a);
  out.scaling = apply_transversal(a, matching);

  LlsProblem problem = build_lls(out.scaling.scaled, pattern, gamma);
  const std::vector<double> s = solve_lls(problem);

  std::vector<Index> colptr(problem.s_pattern.colptr().begin(),
                            problem.s_pattern.colptr().end());
  std::vector<Index> rowind(problem.s_pattern.rowind().begin(),
                            problem.s_pattern.rowind().end());
  out.symmetrizer.pattern = pattern;
  out.symmetrizer.gamma = gamma;
  out.symmetrizer.s =
      SparseMatrix(problem.s_pattern.nrows(), problem.s_pattern.ncols(),
                   std::move(colptr), std::move(rowind), s);

  std::vector<double> bs = spmv(problem.b, s);
  double obj = 0.0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const double d = bs[i] - problem.rhs[i];
    obj += d * d;
  }
  out.symmetrizer.objective_value = obj;

  out.a_hat = multiply(out.scaling.scaled, out.symmetrizer.s);
  return out;
}

} // namespace skewprec
