#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "skewprec/skew_krylov.hpp"
#include "skewprec/skew_operator.hpp"
#include "skewprec/sparse_matrix.hpp"
#include "skewprec/types.hpp"
#include "test_util.hpp"

using namespace skewprec;
using testutil::Rng;

namespace {

Eigen::MatrixXd tridiag_of(const std::vector<double>& alphas) {
  const Index k = Index(alphas.size()) + 1;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
  for (Index i = 0; i + 1 < k; ++i) {
    s(i, i + 1) = alphas[i];
    s(i + 1, i) = -alphas[i];
  }
  return s;
}

} // namespace

TEST_CASE("lanczos basis is orthonormal and tridiagonalizes the operator") {
  Rng rng(21);
  const Index n = 40;
  const Index k = 9;
  const SkewOperator j(testutil::random_strict_upper(n, 4, rng));
  const std::vector<double> start = testutil::random_vector(n, rng);
  const LanczosBasis basis = skew_lanczos(j, start, k);
  REQUIRE(basis.q.cols() == k);
  REQUIRE(basis.alphas.size() == std::size_t(k - 1));
  for (const double a : basis.alphas)
    CHECK(a > 0.0);

  const Eigen::MatrixXd q = testutil::to_dense(basis.q);
  const Eigen::MatrixXd gram =
      q.transpose() * q - Eigen::MatrixXd::Identity(k, k);
  CHECK(gram.cwiseAbs().maxCoeff() <= 1e-8);

  const Eigen::MatrixXd jd = testutil::to_dense(j.to_full());
  const Eigen::MatrixXd s = tridiag_of(basis.alphas);
  CHECK((q.transpose() * jd * q - s).cwiseAbs().maxCoeff() <= 1e-8);

  const Eigen::MatrixXd rem = jd * q - q * s;
  CHECK(rem.leftCols(k - 1).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("lanczos stops when the krylov space is exhausted") {
  const std::vector<Triplet> trips = {{0, 1, 3.0}};
  const SkewOperator j(SparseMatrix::from_triplets(6, 6, trips));
  std::vector<double> start(6, 0.0);
  start[0] = 2.0;
  const LanczosBasis basis = skew_lanczos(j, start, 5);
  REQUIRE(basis.q.cols() == 2);
  REQUIRE(basis.alphas.size() == 1);
  CHECK(basis.alphas[0] == doctest::Approx(3.0).epsilon(1e-14));

  const Eigen::MatrixXd q = testutil::to_dense(basis.q);
  const Eigen::MatrixXd jd = testutil::to_dense(j.to_full());
  const Eigen::MatrixXd rem = jd * q - q * tridiag_of(basis.alphas);
  CHECK(rem.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("deflation zeroes the projected block of the operator") {
  Rng rng(99);
  const Index n = 24;
  SkewOperator j(testutil::random_strict_upper(n, 3, rng));
  const LanczosBasis basis = skew_lanczos(j, 7);
  j.set_correction(make_deflation(basis));

  const Eigen::MatrixXd defl = testutil::dense_operator(j);
  CHECK((defl + defl.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::MatrixXd q = testutil::to_dense(basis.q);
  CHECK((q.transpose() * defl * q).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("mrs solves the identity system in one sweep") {
  Rng rng(5);
  const Index n = 17;
  const SkewOperator j(SparseMatrix::from_triplets(n, n, {}));
  const std::vector<double> b = testutil::random_vector(n, rng);
  const MrsResult r = mrs_solve(j, 1.0, b, 1e-10, 50);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(testutil::max_abs_diff(r.x.col(0), b) <= 1e-14);
  CHECK(r.true_residuals[0] <= 1e-14);
  REQUIRE(r.histories[0].size() == 2);
  CHECK(r.histories[0][0] == 1.0);
}

TEST_CASE("mrs reproduces the closed-form 2x2 solution") {
  const std::vector<Triplet> trips = {{0, 1, 2.0}};
  const SkewOperator j(SparseMatrix::from_triplets(2, 2, trips));
  const std::vector<double> b = {1.0, 0.0};
  const MrsResult r = mrs_solve(j, 1.0, b, 1e-12, 10);
  CHECK(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.x(0, 0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.x(1, 0) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.true_residuals[0] <= 1e-12);
}

TEST_CASE("mrs matches a dense solve and its estimate tracks the residual") {
  Rng rng(123);
  const Index n = 30;
  const SkewOperator j(testutil::random_strict_upper(n, 3, rng));
  const std::vector<double> b = testutil::random_vector(n, rng);
  const MrsResult r = mrs_solve(j, 1.0, b, 1e-12, 20 * n);
  REQUIRE(r.converged);

  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) +
                            testutil::to_dense(j.to_full());
  const Eigen::VectorXd xd = a.partialPivLu().solve(testutil::to_eigen(b));
  CHECK(testutil::max_abs_diff(r.x.col(0), testutil::from_eigen(xd)) <= 1e-9);

  const auto& h = r.histories[0];
  REQUIRE(h.size() == std::size_t(r.iterations) + 1);
  CHECK(h.front() == 1.0);
  for (std::size_t t = 1; t < h.size(); ++t)
    CHECK(h[t] <= h[t - 1] + 1e-12);

  const double true_rel = r.true_residuals[0] / norm2(b);
  CHECK(std::abs(r.estimates[0] - true_rel) <= 1e-8 + 1e-3 * r.estimates[0]);
}

TEST_CASE("simultaneous mrs treats each column like a separate solve") {
  Rng rng(321);
  const Index n = 26;
  const SkewOperator j(testutil::random_strict_upper(n, 3, rng));
  DenseMatrix b(n, 3);
  for (Index c = 0; c < 3; ++c) {
    const std::vector<double> v = testutil::random_vector(n, rng);
    std::copy(v.begin(), v.end(), b.col(c).begin());
  }
  const MrsResult r = mrs_solve(j, 1.0, b, 1e-11, 20 * n);
  REQUIRE(r.converged);

  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) +
                            testutil::to_dense(j.to_full());
  for (Index c = 0; c < 3; ++c) {
    const Eigen::VectorXd xd =
        a.partialPivLu().solve(testutil::to_eigen(b.col(c)));
    CHECK(testutil::max_abs_diff(r.x.col(c), testutil::from_eigen(xd)) <= 1e-8);
    CHECK(r.estimates[c] < 1e-11);
    CHECK(r.histories[c].size() == std::size_t(r.iterations) + 1);
  }
}

TEST_CASE("a zero right-hand side column is returned as already solved") {
  Rng rng(77);
  const Index n = 15;
  const SkewOperator j(testutil::random_strict_upper(n, 2, rng));
  DenseMatrix b(n, 2);
  const std::vector<double> v = testutil::random_vector(n, rng);
  std::copy(v.begin(), v.end(), b.col(0).begin());
  const MrsResult r = mrs_solve(j, 1.0, b, 1e-10, 20 * n);
  CHECK(r.converged);
  for (Index i = 0; i < n; ++i)
    CHECK(r.x(i, 1) == 0.0);
  CHECK(r.estimates[1] == 0.0);
  CHECK(r.true_residuals[1] == 0.0);
  CHECK(r.histories[1].front() == 0.0);
}

TEST_CASE("mrs honors the iteration cap and reports the failure") {
  Rng rng(404);
  const Index n = 40;
  const SkewOperator j(testutil::random_strict_upper(n, 4, rng));
  const std::vector<double> b = testutil::random_vector(n, rng);
  const MrsResult r = mrs_solve(j, 1.0, b, 1e-14, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.estimates[0] > 0.0);
  CHECK(r.true_residuals[0] > 0.0);
}

TEST_CASE("mrs works on a deflated operator") {
  Rng rng(888);
  const Index n = 24;
  SkewOperator j(testutil::random_strict_upper(n, 3, rng));
  const LanczosBasis basis = skew_lanczos(j, 6);
  const Eigen::MatrixXd plain = testutil::to_dense(j.to_full());
  j.set_correction(make_deflation(basis));

  const Eigen::MatrixXd q = testutil::to_dense(basis.q);
  const Eigen::MatrixXd defl =
      plain - q * tridiag_of(basis.alphas) * q.transpose();
  const std::vector<double> b = testutil::random_vector(n, rng);
  const Eigen::VectorXd xd =
      (Eigen::MatrixXd::Identity(n, n) + defl)
          .partialPivLu()
          .solve(testutil::to_eigen(b));

  const MrsResult r = mrs_solve(j, 1.0, b, 1e-12, 20 * n);
  REQUIRE(r.converged);
  CHECK(testutil::max_abs_diff(r.x.col(0), testutil::from_eigen(xd)) <= 1e-8);
}
