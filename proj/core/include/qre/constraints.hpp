#pragma once

#include <optional>
#include <vector>

#include "qre/hermitian.hpp"

namespace qre {

/// Raw measurement constraints: observables Z_i with estimates fhat_i and
/// optional per-observable reliability indexes d_2..d_p in (0, 1].
/// The first observable is always the identity with estimate 1; it carries
/// the unit-trace constraint.
class ConstraintSet {
 public:
  ConstraintSet(std::vector<HermitianMatrix> observables,
                std::vector<double> estimates,
                std::optional<std::vector<double>> reliability = std::nullopt);

  int dim() const { return observables_[0].dim(); }
  int count() const { return static_cast<int>(observables_.size()); }

  const std::vector<HermitianMatrix>& observables() const { return observables_; }
  const std::vector<double>& estimates() const { return estimates_; }
  Eigen::VectorXd estimates_vector() const;
  const std::optional<std::vector<double>>& reliability() const { return reliability_; }

 private:
  std::vector<HermitianMatrix> observables_;
  std::vector<double> estimates_;
  std::optional<std::vector<double>> reliability_;
};

/// Orthonormalized constraint problem: an orthonormal basis X_1..X_m of the
/// observable span (X_1 = I/sqrt(n)), the transformed data fbar with
/// fbar_1 = 1/sqrt(n), an orthonormal traceless completion Y_1..Y_{n^2-m},
/// the m x p transform T with fbar = T fhat, and the pseudo-state
/// rho0 = sum_i fbar_i X_i (unit trace, not necessarily positive).
class OrthonormalProblem {
 public:
  OrthonormalProblem(int dim, std::vector<HermitianMatrix> basis,
                     std::vector<HermitianMatrix> completion,
                     Eigen::VectorXd data, Eigen::MatrixXd transform);

  int dim() const { return dim_; }
  int m() const { return static_cast<int>(basis_.size()); }

  const std::vector<HermitianMatrix>& basis() const { return basis_; }
  const std::vector<HermitianMatrix>& completion() const { return completion_; }
  const Eigen::VectorXd& data() const { return data_; }
  const Eigen::MatrixXd& transform() const { return transform_; }
  const HermitianMatrix& pseudo_state() const { return rho0_; }

  /// Same basis and transform with replaced data (rho0 rebuilt). The first
  /// component must stay 1/sqrt(n): the trace constraint is never relaxed.
  OrthonormalProblem with_data(const Eigen::VectorXd& new_data) const;

 private:
  int dim_;
  std::vector<HermitianMatrix> basis_;
  std::vector<HermitianMatrix> completion_;
  Eigen::VectorXd data_;
  Eigen::MatrixXd transform_;
  HermitianMatrix rho0_;
};

/// Default tolerance below which a Gram-Schmidt residual is considered zero
/// and the observable dropped as linearly dependent.
double default_dep_tol(int dim);

/// Gram-Schmidt orthonormalization of the constraint set, starting from
/// X_1 = I/sqrt(n). Observables whose residual norm falls at or below
/// dep_tol are dropped as redundant (no row of T). Pass dep_tol < 0 for the
/// default.
OrthonormalProblem orthonormalize(const ConstraintSet& cs, double dep_tol = -1.0);

/// Orthonormal completion of the given orthonormal family to a basis of the
/// Hermitian matrices of the given dimension. When the identity lies in the
/// span of x (always true for orthonormalize output), every returned matrix
/// is traceless.
std::vector<HermitianMatrix> complete_basis(const std::vector<HermitianMatrix>& x,
                                            int dim);

/// rho -> (tr(rho X_1), ..., tr(rho X_m)).
Eigen::VectorXd apply_L(const OrthonormalProblem& ob, const HermitianMatrix& rho);

/// lambda -> sum_i lambda_i X_i, the adjoint of apply_L.
HermitianMatrix apply_L_adjoint(const OrthonormalProblem& ob,
                                const Eigen::VectorXd& lambda);

}  // namespace qre
