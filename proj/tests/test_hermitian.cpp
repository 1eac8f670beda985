#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace qre;
using namespace qre::test;

TEST_CASE("construction symmetrizes and validates") {
  Eigen::MatrixXcd skew(2, 2);
  skew << 1.0, ii, 0.0, 2.0;  // not Hermitian
  const HermitianMatrix h(skew);
  CHECK((h.matrix() - h.matrix().adjoint()).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(HermitianMatrix(Eigen::MatrixXcd::Zero(2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(HermitianMatrix(Eigen::MatrixXcd::Zero(0, 0)), DimensionMismatch);
}

TEST_CASE("frobenius_inner on Pauli pairs") {
  CHECK(frobenius_inner(HermitianMatrix::identity(2), HermitianMatrix::identity(2)) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(frobenius_inner(pauli_z(), pauli_z()) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(frobenius_inner(pauli_x(), pauli_z()) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(frobenius_inner(pauli_x(), HermitianMatrix::identity(3)),
                  DimensionMismatch);
}

TEST_CASE("herm_exp on diagonal and spectral inputs") {
  const HermitianMatrix e0 = herm_exp(HermitianMatrix::zero(2));
  CHECK((e0.matrix() - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);

  Eigen::VectorXd d(2);
  d << std::log(2.0), std::log(3.0);
  const HermitianMatrix e1 = herm_exp(HermitianMatrix::diagonal(d));
  CHECK(e1.matrix()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e1.matrix()(1, 1).real() == doctest::Approx(3.0).epsilon(1e-14));

  // Oracle: scalar exponential of each eigenvalue.
  Eigen::VectorXd logs(2);
  logs << std::log(0.75), std::log(0.25);
  const HermitianMatrix e2 = herm_exp(HermitianMatrix::diagonal(logs));
  CHECK(e2.matrix()(0, 0).real() == doctest::Approx(std::exp(logs(0))).epsilon(1e-14));
  CHECK(e2.matrix()(1, 1).real() == doctest::Approx(std::exp(logs(1))).epsilon(1e-14));
  CHECK(min_eigenvalue(e2) > 0);
}

TEST_CASE("herm_log on diagonal inputs and failure path") {
  const HermitianMatrix l0 = herm_log(HermitianMatrix::identity(2));
  CHECK(l0.frobenius_norm() < 1e-14);

  Eigen::VectorXd d(2);
  d << std::exp(1.0), std::exp(2.0);
  const HermitianMatrix l1 = herm_log(HermitianMatrix::diagonal(d));
  CHECK(l1.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l1.matrix()(1, 1).real() == doctest::Approx(2.0).epsilon(1e-14));

  Eigen::VectorXd bad(2);
  bad << 0.5, -0.1;
  try {
    herm_log(HermitianMatrix::diagonal(bad));
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.offending_eigenvalue == doctest::Approx(-0.1).epsilon(1e-12));
  }
}

TEST_CASE("min_eigenvalue closed-form cases") {
  Eigen::VectorXd d(2);
  d << 1.1, -0.1;
  // 2x2 closed form: (a+d)/2 - sqrt(((a-d)/2)^2 + |b|^2) with b = 0.
  CHECK(min_eigenvalue(HermitianMatrix::diagonal(d)) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(min_eigenvalue(HermitianMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_eigenvalue(pauli_x()) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(is_psd(HermitianMatrix::identity(2), 0.0));
  CHECK_FALSE(is_psd(pauli_x(), 1e-3));
}

TEST_CASE("exp/log round trip and commutation over random matrices") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform01() * 6);
    const HermitianMatrix a = random_hermitian(n, rng);
    const double scale = 1.0 + a.frobenius_norm();

    const HermitianMatrix back = herm_log(herm_exp(a), -1e300);
    CHECK((back - a).frobenius_norm() <= 1e-8 * scale);

    const Eigen::MatrixXcd ea = herm_exp(a).matrix();
    const Eigen::MatrixXcd comm = a.matrix() * ea - ea * a.matrix();
    CHECK(comm.norm() <= 1e-9 * scale * scale);
  }
}

TEST_CASE("inner product is positive definite") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const HermitianMatrix a = random_hermitian(3, rng);
    if (a.frobenius_norm() > 1e-12) {
      CHECK(frobenius_inner(a, a) > 0);
    }
    const HermitianMatrix b = random_hermitian(3, rng);
    CHECK(frobenius_inner(a, b) == doctest::Approx(frobenius_inner(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue shift identity") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 4);
    const HermitianMatrix a = random_hermitian(n, rng);
    const double c = 3.0 * rng.normal();
    const HermitianMatrix shifted = a + HermitianMatrix::identity(n) * c;
    CHECK(min_eigenvalue(shifted) ==
          doctest::Approx(min_eigenvalue(a) + c).epsilon(1e-10));
  }
}

TEST_CASE("eigendecomposition reconstructs and sorts ascending") {
  Rng rng(3);
  const HermitianMatrix a = random_hermitian(5, rng);
  const EigenDecomposition d = eig(a);
  CHECK((d.reconstruct() - a.matrix()).norm() <= 1e-10 * (1.0 + a.frobenius_norm()));
  for (int i = 1; i < 5; ++i) CHECK(d.values(i) >= d.values(i - 1));
  CHECK((d.vectors.adjoint() * d.vectors - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-12);
}
