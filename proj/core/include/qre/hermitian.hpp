#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qre/errors.hpp"
#include "qre/numeric.hpp"

namespace qre {

/// Dense n x n complex Hermitian matrix. The universal carrier for states,
/// observables and basis elements. Constructors symmetrize, so the invariant
/// entries(j,k) == conj(entries(k,j)) holds exactly after construction.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Eigen::MatrixXcd entries);

  static HermitianMatrix identity(int dim);
  static HermitianMatrix zero(int dim);
  static HermitianMatrix diagonal(const Eigen::VectorXd& values);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }

  double trace() const { return entries_.trace().real(); }
  double frobenius_norm() const { return entries_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator*(double scale) const;

 private:
  Eigen::MatrixXcd entries_;
};

inline HermitianMatrix operator*(double scale, const HermitianMatrix& a) {
  return a * scale;
}

/// Spectral decomposition A = vectors * diag(values) * vectors^dagger,
/// eigenvalues sorted ascending, columns orthonormal.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;

  Eigen::MatrixXcd reconstruct() const {
    return vectors * values.asDiagonal() * vectors.adjoint();
  }
};

EigenDecomposition eig(const HermitianMatrix& a);

/// tr(AB). Real for Hermitian arguments; the imaginary residue is checked
/// against numeric_config().inner_imag_tol and discarded.
double frobenius_inner(const HermitianMatrix& a, const HermitianMatrix& b);

/// Matrix exponential through the spectral decomposition.
HermitianMatrix herm_exp(const HermitianMatrix& a);

/// Matrix logarithm; every eigenvalue must exceed `floor`.
HermitianMatrix herm_log(const HermitianMatrix& a, double floor);
HermitianMatrix herm_log(const HermitianMatrix& a);

double min_eigenvalue(const HermitianMatrix& a);

inline bool is_psd(const HermitianMatrix& a, double tol) {
  return min_eigenvalue(a) >= -tol;
}

}  // namespace qre
