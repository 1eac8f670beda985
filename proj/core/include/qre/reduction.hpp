#pragma once

#include "qre/constraints.hpp"

namespace qre {

/// Unitary split of the space into the support of a state (leading columns,
/// eigenvalues descending) and its kernel (trailing columns).
struct KernelDecomposition {
  Eigen::MatrixXcd u;      // n x n unitary
  int support_dim = 0;     // n1, number of support columns
  double rank_tol = 0.0;   // threshold used to split the spectrum

  int dim() const { return static_cast<int>(u.rows()); }
  Eigen::MatrixXcd support() const { return u.leftCols(support_dim); }
  Eigen::MatrixXcd kernel() const { return u.rightCols(dim() - support_dim); }
};

/// Split the spectrum of a PSD unit-trace matrix at rank_tol (pass a
/// negative value for the default n * 1e-9 * lambda_max). Support
/// eigenvectors come first, sorted by descending eigenvalue with a
/// deterministic tie-break.
KernelDecomposition kernel_decomposition(const HermitianMatrix& rho,
                                         double rank_tol = -1.0);

/// The estimation problem compressed onto a support: observables become
/// their upper-left support blocks and are re-orthonormalized (compression
/// breaks orthonormality and may collapse dependent constraints).
struct ReducedProblem {
  OrthonormalProblem problem;   // dimension n1
  KernelDecomposition kernel;
};

ReducedProblem reduce_problem(const OrthonormalProblem& ob,
                              const KernelDecomposition& kd);

/// Embed a support-dimension state as the leading block and conjugate back:
/// U [rho1 0; 0 0] U^dagger.
HermitianMatrix lift_solution(const HermitianMatrix& rho1,
                              const KernelDecomposition& kd);

}  // namespace qre
