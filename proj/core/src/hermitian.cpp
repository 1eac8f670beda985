#include "qre/hermitian.hpp"

#include <cmath>

namespace qre {

NumericConfig& numeric_config() {
  static NumericConfig config;
  return config;
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd entries) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw DimensionMismatch("HermitianMatrix requires a square matrix of dimension >= 1, got " +
                            std::to_string(entries.rows()) + "x" +
                            std::to_string(entries.cols()));
  }
  entries_ = 0.5 * (entries + entries.adjoint().eval());
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(Eigen::MatrixXcd::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(Eigen::MatrixXcd::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const Eigen::VectorXd& values) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(values.size(), values.size());
  m.diagonal() = values.cast<std::complex<double>>();
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("dimension mismatch in +");
  return HermitianMatrix(entries_ + other.entries_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("dimension mismatch in -");
  return HermitianMatrix(entries_ - other.entries_);
}

HermitianMatrix HermitianMatrix::operator*(double scale) const {
  return HermitianMatrix(scale * entries_);
}

EigenDecomposition eig(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("eigendecomposition did not converge (dim " +
                       std::to_string(a.dim()) + ")");
  }
  return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

double frobenius_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("frobenius_inner: dimensions " + std::to_string(a.dim()) +
                            " and " + std::to_string(b.dim()));
  }
  // tr(AB) = sum_jk A_jk conj(B_jk) for Hermitian B.
  const std::complex<double> value =
      (a.matrix().array() * b.matrix().array().conjugate()).sum();
  const double scale = 1.0 + a.frobenius_norm() * b.frobenius_norm();
  if (std::abs(value.imag()) > numeric_config().inner_imag_tol * scale) {
    throw Error("frobenius_inner: imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

HermitianMatrix herm_exp(const HermitianMatrix& a) {
  const EigenDecomposition d = eig(a);
  const Eigen::VectorXd exped = d.values.array().exp();
  return HermitianMatrix(d.vectors * exped.asDiagonal() * d.vectors.adjoint());
}

HermitianMatrix herm_log(const HermitianMatrix& a, double floor) {
  const EigenDecomposition d = eig(a);
  if (d.values(0) <= floor) {
    throw NotPositiveDefinite("herm_log: eigenvalue " + std::to_string(d.values(0)) +
                                  " at or below floor " + std::to_string(floor),
                              d.values(0));
  }
  const Eigen::VectorXd logged = d.values.array().log();
  return HermitianMatrix(d.vectors * logged.asDiagonal() * d.vectors.adjoint());
}

HermitianMatrix herm_log(const HermitianMatrix& a) {
  return herm_log(a, numeric_config().log_floor);
}

double min_eigenvalue(const HermitianMatrix& a) { return eig(a).values(0); }

}  // namespace qre
