#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "skewprec/baseline.hpp"
#include "skewprec/sparse_matrix.hpp"
#include "skewprec/types.hpp"
#include "test_util.hpp"

using namespace skewprec;
using testutil::Rng;

namespace {

/// Dense Gaussian elimination that skips every update landing outside the
/// stored pattern; the classical uniqueness argument makes this order of
/// elimination agree with the row-sweep in the library.
struct DenseIlu {
  Eigen::MatrixXd f;
  std::vector<char> pat;
};

DenseIlu dense_ilu0(const SparseMatrix& a) {
  const Index n = a.nrows();
  DenseIlu out{Eigen::MatrixXd::Zero(n, n), std::vector<char>(n * n, 0)};
  for (Index j = 0; j < n; ++j) {
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p) {
      out.f(a.row_at(p), j) = a.value_at(p);
      out.pat[a.row_at(p) * n + j] = 1;
    }
  }
  for (Index k = 0; k < n; ++k) {
    REQUIRE(out.f(k, k) != 0.0);
    for (Index i = k + 1; i < n; ++i) {
      if (!out.pat[i * n + k])
        continue;
      out.f(i, k) /= out.f(k, k);
      for (Index j = k + 1; j < n; ++j)
        if (out.pat[i * n + j] && out.pat[k * n + j])
          out.f(i, j) -= out.f(i, k) * out.f(k, j);
    }
  }
  return out;
}

bool pattern_contains(const SparseMatrix& outer, const SparseMatrix& inner) {
  for (Index j = 0; j < inner.ncols(); ++j)
    for (Index p = inner.col_begin(j); p < inner.col_end(j); ++p) {
      bool found = false;
      for (Index q = outer.col_begin(j); q < outer.col_end(j); ++q)
        if (outer.row_at(q) == inner.row_at(p)) {
          found = true;
          break;
        }
      if (!found)
        return false;
    }
  return true;
}

} // namespace

TEST_CASE("ilu0 of a lower triangular matrix is the exact factorization") {
  Rng rng(40);
  const Index n = 15;
  SparseMatrix strict = testutil::random_strict_upper(n, 3, rng);
  Eigen::MatrixXd low = testutil::to_dense(strict).transpose();
  for (Index i = 0; i < n; ++i)
    low(i, i) = 2.0 + double(i % 3);
  const SparseMatrix a = testutil::from_dense(low);

  const IluFactor f = ilu0(a);
  for (Index j = 0; j < n; ++j) {
    REQUIRE(f.u.col_end(j) - f.u.col_begin(j) == 1);
    CHECK(f.u.row_at(f.u.col_begin(j)) == j);
  }
  const Eigen::MatrixXd prod =
      testutil::to_dense(f.l) * testutil::to_dense(f.u);
  CHECK((prod - low).cwiseAbs().maxCoeff() <= 1e-12 * low.cwiseAbs().maxCoeff());
}

TEST_CASE("ilu0 of a tridiagonal matrix admits no fill and is exact") {
  Rng rng(41);
  const Index n = 20;
  std::vector<Triplet> trips;
  const std::vector<double> vals = testutil::random_vector(3 * n, rng, -1.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    trips.push_back({i, i, 4.0 + vals[3 * i]});
    if (i + 1 < n) {
      trips.push_back({i + 1, i, vals[3 * i + 1]});
      trips.push_back({i, i + 1, vals[3 * i + 2]});
    }
  }
  const SparseMatrix a = SparseMatrix::from_triplets(n, n, trips);
  const IluFactor f = ilu0(a);
  const Eigen::MatrixXd prod =
      testutil::to_dense(f.l) * testutil::to_dense(f.u);
  const Eigen::MatrixXd ad = testutil::to_dense(a);
  CHECK((prod - ad).cwiseAbs().maxCoeff() <= 1e-12 * ad.cwiseAbs().maxCoeff());
}

TEST_CASE("ilu0 matches a dense pattern-restricted elimination oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 4; ++trial) {
    const Index n = 40;
    const SparseMatrix a = testutil::random_sparse(n, n, 3, rng, 6.0);
    const IluFactor f = ilu0(a);
    const DenseIlu oracle = dense_ilu0(a);

    CHECK(pattern_contains(a, f.l));
    CHECK(pattern_contains(a, f.u));
    for (Index j = 0; j < n; ++j) {
      for (Index p = f.l.col_begin(j); p < f.l.col_end(j); ++p) {
        const Index i = f.l.row_at(p);
        const double want = i == j ? 1.0 : oracle.f(i, j);
        CHECK(std::abs(f.l.value_at(p) - want) <= 1e-12);
      }
      for (Index p = f.u.col_begin(j); p < f.u.col_end(j); ++p)
        CHECK(std::abs(f.u.value_at(p) - oracle.f(f.u.row_at(p), j)) <= 1e-12);
    }

    const SparseMatrix prod = multiply(f.l, f.u);
    const double scale = frobenius_norm(a);
    for (Index j = 0; j < n; ++j)
      for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
        CHECK(std::abs(prod.coeff(a.row_at(p), j) - a.value_at(p)) <=
              1e-12 * scale);
  }
}

TEST_CASE("ilu0 reports the pivot column on breakdown") {
  const std::vector<Triplet> trips = {
      {0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, trips);
  try {
    ilu0(a);
    FAIL("expected FactorizationBreakdown");
  } catch (const FactorizationBreakdown& e) {
    CHECK(e.column() == 1);
  }

  const std::vector<Triplet> hollow = {{0, 1, 1.0}, {1, 0, 1.0}};
  const SparseMatrix h = SparseMatrix::from_triplets(2, 2, hollow);
  CHECK_THROWS_AS(ilu0(h), FactorizationBreakdown);
}

TEST_CASE("ilu_solve inverts the product of the factors") {
  Rng rng(43);
  const Index n = 30;
  const SparseMatrix a = testutil::random_sparse(n, n, 4, rng, 6.0);
  const IluFactor f = ilu0(a);
  const std::vector<double> b = testutil::random_vector(n, rng);
  const std::vector<double> x = ilu_solve(f, b);
  const std::vector<double> back = spmv(f.l, spmv(f.u, x));
  CHECK(testutil::max_abs_diff(back, b) <= 1e-12 * (norm2(b) + 1.0));
}

TEST_CASE("mps_rcm_solve solves the identity in one half sweep") {
  const Index n = 9;
  const SparseMatrix a = SparseMatrix::identity(n);
  std::vector<double> b(n);
  for (Index i = 0; i < n; ++i)
    b[i] = double(i) - 4.0;
  const BaselineReport rep = mps_rcm_solve(a, b, {});
  REQUIRE(rep.status == SolveStatus::converged);
  CHECK(rep.iterations <= 1.0);
  CHECK(testutil::max_abs_diff(rep.x, b) <= 1e-12);
}

TEST_CASE("mps_rcm_solve recovers a known solution") {
  Rng rng(44);
  const Index n = 60;
  const SparseMatrix a =
      testutil::random_structurally_nonsingular(n, 3, rng, 1.5, 2.5);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const std::vector<double> b =
      testutil::from_eigen(testutil::to_dense(a) * ones);
  const BaselineReport rep = mps_rcm_solve(a, b, {1e-9, 2000});
  REQUIRE(rep.status == SolveStatus::converged);
  CHECK(rep.relres <= 1e-8);
  std::vector<double> want(n, 1.0);
  CHECK(testutil::max_abs_diff(rep.x, want) <= 1e-6);
  CHECK(rep.history.front() == 1.0);
  CHECK(rep.iterations > 0.0);
}

TEST_CASE("mps_rcm_solve reports factorization breakdown in the status") {
  const std::vector<Triplet> trips = {
      {0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, trips);
  const std::vector<double> b = {1.0, 2.0};
  const BaselineReport rep = mps_rcm_solve(a, b, {});
  CHECK(rep.status == SolveStatus::breakdown);
  CHECK(rep.x == std::vector<double>{0.0, 0.0});
  CHECK(rep.relres == 1.0);
}

TEST_CASE("mps_rcm_solve short-circuits a zero right-hand side") {
  const SparseMatrix a = SparseMatrix::identity(5);
  const std::vector<double> b(5, 0.0);
  const BaselineReport rep = mps_rcm_solve(a, b, {});
  CHECK(rep.status == SolveStatus::converged);
  CHECK(rep.x == std::vector<double>(5, 0.0));
  CHECK(rep.history == std::vector<double>{0.0});
}
