#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "skewprec/ildl.hpp"
#include "skewprec/sparse_matrix.hpp"
#include "skewprec/types.hpp"
#include "test_util.hpp"

using namespace skewprec;
using testutil::Rng;

namespace {

Eigen::MatrixXd dense_pivots(const BlockLdlFactor& f) {
  const Index n = f.l.ncols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (const PivotBlock& blk : f.d) {
    d(blk.start, blk.start) = blk.a;
    if (blk.size == 2) {
      d(blk.start + 1, blk.start) = blk.b;
      d(blk.start, blk.start + 1) = blk.b;
      d(blk.start + 1, blk.start + 1) = blk.c;
    }
  }
  return d;
}

Eigen::MatrixXd dense_abs_pivots(const BlockLdlFactor& f) {
  const Index n = f.l.ncols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (const PivotBlock& blk : f.d) {
    if (blk.size == 1) {
      d(blk.start, blk.start) = std::abs(blk.a);
      continue;
    }
    Eigen::Matrix2d b;
    b << blk.a, blk.b, blk.b, blk.c;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(b);
    const Eigen::Matrix2d babs = es.eigenvectors() *
                                 es.eigenvalues().cwiseAbs().asDiagonal() *
                                 es.eigenvectors().transpose();
    d.block<2, 2>(blk.start, blk.start) = babs;
  }
  return d;
}

Eigen::MatrixXd permuted_dense(const SparseMatrix& m,
                               const std::vector<Index>& perm) {
  const Eigen::MatrixXd a = testutil::to_dense(m);
  const Index n = m.nrows();
  Eigen::MatrixXd p(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      p(i, j) = a(perm[i], perm[j]);
  return p;
}

void check_factor_shape(const BlockLdlFactor& f) {
  const Index n = f.l.ncols();
  Index pos = 0;
  for (const PivotBlock& blk : f.d) {
    CHECK(blk.start == pos);
    CHECK((blk.size == 1 || blk.size == 2));
    pos += blk.size;
  }
  CHECK(pos == n);
  for (Index j = 0; j < n; ++j) {
    CHECK(f.l.row_at(f.l.col_begin(j)) == j);
    CHECK(f.l.value_at(f.l.col_begin(j)) == 1.0);
  }
}

double reconstruction_error(const SparseMatrix& m, const BlockLdlFactor& f) {
  const Eigen::MatrixXd l = testutil::to_dense(f.l);
  const Eigen::MatrixXd lhs = l * dense_pivots(f) * l.transpose();
  return (lhs - permuted_dense(m, f.perm)).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("exact block factorization reconstructs the permuted matrix") {
  Rng rng(411);
  for (const Index n : {6, 13, 24, 41}) {
    for (const double shift : {0.0, 2.0, -2.0}) {
      const SparseMatrix m = testutil::random_symmetric(n, 3, rng, shift);
      const BlockLdlFactor f = ildl_factor(m, IldlVariant::exact());
      check_factor_shape(f);
      const double scale = frobenius_norm(m) + 1.0;
      CHECK(reconstruction_error(m, f) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("a zero diagonal forces a 2x2 pivot") {
  const std::vector<Triplet> trips = {{0, 1, 1.0}, {1, 0, 1.0}};
  const SparseMatrix m = SparseMatrix::from_triplets(2, 2, trips);
  const BlockLdlFactor f = ildl_factor(m, IldlVariant::exact());
  REQUIRE(f.d.size() == 1);
  CHECK(f.d[0].size == 2);
  CHECK(f.d[0].a == 0.0);
  CHECK(f.d[0].b == 1.0);
  CHECK(f.d[0].c == 0.0);
  CHECK(f.pivot_2x2_count == 1);
  CHECK(f.l.nnz() == 2);
}

TEST_CASE("zeroed diagonals in a larger matrix still factor exactly") {
  Rng rng(7);
  const SparseMatrix base = testutil::random_symmetric(18, 3, rng);
  Eigen::MatrixXd d = testutil::to_dense(base);
  for (const Index i : {0, 5, 6, 11})
    d(i, i) = 0.0;
  const SparseMatrix m = testutil::from_dense(d);
  const BlockLdlFactor f = ildl_factor(m, IldlVariant::exact());
  check_factor_shape(f);
  CHECK(reconstruction_error(m, f) <= 1e-9 * (frobenius_norm(m) + 1.0));
}

TEST_CASE("a structurally singular pivot reports the breakdown column") {
  const std::vector<Triplet> trips = {
      {0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  const SparseMatrix m = SparseMatrix::from_triplets(2, 2, trips);
  CHECK_THROWS_AS(ildl_factor(m, IldlVariant::exact()), FactorizationBreakdown);
  try {
    ildl_factor(m, IldlVariant::exact());
  } catch (const FactorizationBreakdown& e) {
    CHECK(e.column() == 1);
  }
}

TEST_CASE("non-symmetric input is rejected") {
  const std::vector<Triplet> trips = {{0, 1, 1.0}};
  const SparseMatrix m = SparseMatrix::from_triplets(2, 2, trips);
  CHECK_THROWS_AS(ildl_factor(m, IldlVariant::exact()), DimensionError);
}

TEST_CASE("absolute value modification splits the factorization") {
  Rng rng(1912);
  for (const Index n : {9, 22, 35}) {
    const SparseMatrix m = testutil::random_symmetric(n, 3, rng);
    const BlockLdlFactor f = ildl_factor(m, IldlVariant::exact());
    const AbsFactor af = abs_modify(f);

    const Eigen::MatrixXd l = testutil::to_dense(f.l);
    const Eigen::MatrixXd sl = testutil::to_dense(af.l);
    const Eigen::MatrixXd mr = testutil::to_dense(af.m_r);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    const double scale = frobenius_norm(m) + 1.0;

    const Eigen::MatrixXd split =
        sl * (eye + mr) * sl.transpose() - l * dense_pivots(f) * l.transpose();
    CHECK(split.cwiseAbs().maxCoeff() <= 1e-8 * scale);

    const Eigen::MatrixXd spd =
        sl * sl.transpose() - l * dense_abs_pivots(f) * l.transpose();
    CHECK(spd.cwiseAbs().maxCoeff() <= 1e-8 * scale);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_d(dense_pivots(f));
    Index neg = 0;
    for (Index i = 0; i < n; ++i) {
      if (es_d.eigenvalues()(i) < 0.0)
        ++neg;
    }
    CHECK(af.rank == neg);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_r(mr);
    Index minus_two = 0;
    for (Index i = 0; i < n; ++i) {
      const double lam = es_r.eigenvalues()(i);
      const bool near_zero = std::abs(lam) <= 1e-9;
      const bool near_minus_two = std::abs(lam + 2.0) <= 1e-9;
      CHECK((near_zero || near_minus_two));
      if (near_minus_two)
        ++minus_two;
    }
    CHECK(minus_two == af.rank);

    for (std::size_t i = 1; i < af.ind.size(); ++i)
      CHECK(af.ind[i - 1] < af.ind[i]);
    std::vector<bool> has_row(n, false);
    for (Index j = 0; j < n; ++j)
      for (Index p = af.m_r.col_begin(j); p < af.m_r.col_end(j); ++p)
        if (af.m_r.value_at(p) != 0.0)
          has_row[af.m_r.row_at(p)] = true;
    std::vector<Index> expect;
    for (Index i = 0; i < n; ++i)
      if (has_row[i])
        expect.push_back(i);
    CHECK(af.ind == expect);
  }
}

TEST_CASE("low rank term reproduces the remainder exactly") {
  Rng rng(88);
  for (const Index n : {11, 26}) {
    const SparseMatrix m = testutil::random_symmetric(n, 3, rng);
    const AbsFactor af = abs_modify(ildl_factor(m, IldlVariant::exact()));
    const LowRankTerm lr = low_rank_decompose(af.m_r, af.ind, af.rank);

    CHECK(lr.u.ncols() == af.rank);
    CHECK(Index(lr.sigma.size()) == af.rank);
    for (const double s : lr.sigma)
      CHECK(s == -2.0);
    for (Index j = 0; j < lr.u.ncols(); ++j)
      CHECK(lr.u.col_end(j) - lr.u.col_begin(j) <= 2);

    const Eigen::MatrixXd u = testutil::to_dense(lr.u);
    const Eigen::MatrixXd gram =
        u.transpose() * u - Eigen::MatrixXd::Identity(af.rank, af.rank);
    CHECK(gram.cwiseAbs().maxCoeff() <= 1e-12);

    const Eigen::MatrixXd rebuilt = u * (-2.0) * u.transpose();
    const Eigen::MatrixXd diff = rebuilt - testutil::to_dense(af.m_r);
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("the walk pairs adjacent coupled indices and splits the rest") {
  const double r = std::sqrt(0.5);
  const std::vector<Triplet> trips = {{0, 0, -2.0},
                                      {3, 3, -1.0},
                                      {3, 4, 1.0},
                                      {4, 3, 1.0},
                                      {4, 4, -1.0}};
  const SparseMatrix m_r = SparseMatrix::from_triplets(6, 6, trips);
  const std::vector<Index> ind = {0, 3, 4};
  const LowRankTerm lr = low_rank_decompose(m_r, ind, 2);
  REQUIRE(lr.u.ncols() == 2);
  CHECK(lr.u.coeff(0, 0) == 1.0);
  CHECK(lr.u.coeff(3, 1) == doctest::Approx(r).epsilon(1e-12));
  CHECK(lr.u.coeff(4, 1) == doctest::Approx(-r).epsilon(1e-12));
}

TEST_CASE("a rank mismatch in the walk is detected") {
  const std::vector<Triplet> trips = {{0, 0, -2.0}, {2, 2, -2.0}};
  const SparseMatrix m_r = SparseMatrix::from_triplets(4, 4, trips);
  const std::vector<Index> ind = {0, 2};
  CHECK_THROWS_AS(low_rank_decompose(m_r, ind, 1), SolverError);
}

TEST_CASE("triangular solves invert the permuted factor") {
  Rng rng(333);
  const Index n = 28;
  const SparseMatrix m = testutil::random_symmetric(n, 3, rng);
  const AbsFactor af = abs_modify(ildl_factor(m, IldlVariant::exact()));
  const Eigen::MatrixXd sl = testutil::to_dense(af.l);

  const std::vector<double> b = testutil::random_vector(n, rng);
  const std::vector<double> y = solve_with_l(af, b);
  Eigen::VectorXd pb(n);
  for (Index i = 0; i < n; ++i)
    pb(i) = b[af.perm[i]];
  const Eigen::VectorXd ly = sl * testutil::to_eigen(y);
  CHECK((ly - pb).cwiseAbs().maxCoeff() <= 1e-10 * (pb.cwiseAbs().maxCoeff() + 1.0));

  const std::vector<double> c = testutil::random_vector(n, rng);
  const std::vector<double> x = solve_with_lt(af, c);
  Eigen::VectorXd px(n);
  for (Index i = 0; i < n; ++i)
    px(i) = x[af.perm[i]];
  const Eigen::VectorXd ltpx = sl.transpose() * px;
  CHECK((ltpx - testutil::to_eigen(c)).cwiseAbs().maxCoeff() <=
        1e-9 * (sl.cwiseAbs().maxCoeff() + 1.0));
}

TEST_CASE("positive definite input leaves no remainder") {
  Rng rng(5150);
  const SparseMatrix m = testutil::random_symmetric(20, 3, rng, 8.0);
  const AbsFactor af = abs_modify(ildl_factor(m, IldlVariant::exact()));
  CHECK(af.rank == 0);
  CHECK(af.m_r.nnz() == 0);
  CHECK(af.ind.empty());
  const LowRankTerm lr = low_rank_decompose(af.m_r, af.ind, af.rank);
  CHECK(lr.u.ncols() == 0);
  CHECK(lr.sigma.empty());
}

TEST_CASE("nofill caps each factor column by the matching matrix column") {
  Rng rng(202);
  const Index n = 40;
  const SparseMatrix m = testutil::random_symmetric(n, 4, rng, 3.0);
  const BlockLdlFactor f = ildl_factor(m, IldlVariant::nofill());
  check_factor_shape(f);
  for (Index j = 0; j < n; ++j) {
    const Index lcol = f.l.col_end(j) - f.l.col_begin(j) - 1;
    const Index orig = f.perm[j];
    const Index mcol = m.col_end(orig) - m.col_begin(orig);
    CHECK(lcol <= mcol);
  }
}

TEST_CASE("larger drop thresholds keep fewer entries") {
  Rng rng(606);
  const Index n = 50;
  const SparseMatrix m = testutil::random_symmetric(n, 5, rng, 2.0);
  const Index exact = ildl_factor(m, IldlVariant::exact()).l.nnz();
  const Index loose = ildl_factor(m, IldlVariant::threshold(1e-2)).l.nnz();
  const Index tight = ildl_factor(m, IldlVariant::threshold(1e-1)).l.nnz();
  CHECK(exact >= loose);
  CHECK(loose >= tight);
  CHECK(tight >= n);
}
