#include "qre/constraints.hpp"

#include <cmath>
#include <complex>

namespace qre {
namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void subtract_projection(Eigen::MatrixXcd& r, Eigen::RowVectorXd* row,
                         const HermitianMatrix& onto,
                         const Eigen::RowVectorXd* onto_row) {
  const std::complex<double> c =
      (r.array() * onto.matrix().array().conjugate()).sum();
  r -= c.real() * onto.matrix();
  if (row && onto_row) *row -= c.real() * (*onto_row);
}

/// Canonical orthonormal basis of the Hermitian matrices: diagonal units,
/// then for each k < l the symmetric and antisymmetric unit pairs.
std::vector<Eigen::MatrixXcd> canonical_hermitian_basis(int n) {
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
    e(k, k) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(n, n);
      sym(k, l) = s;
      sym(l, k) = s;
      basis.push_back(std::move(sym));
      Eigen::MatrixXcd anti = Eigen::MatrixXcd::Zero(n, n);
      anti(k, l) = kI * s;
      anti(l, k) = -kI * s;
      basis.push_back(std::move(anti));
    }
  }
  return basis;
}

}  // namespace

ConstraintSet::ConstraintSet(std::vector<HermitianMatrix> observables,
                             std::vector<double> estimates,
                             std::optional<std::vector<double>> reliability)
    : observables_(std::move(observables)),
      estimates_(std::move(estimates)),
      reliability_(std::move(reliability)) {
  if (observables_.empty()) throw Error("ConstraintSet: no observables");
  if (observables_.size() != estimates_.size()) {
    throw DimensionMismatch("ConstraintSet: " + std::to_string(observables_.size()) +
                            " observables vs " + std::to_string(estimates_.size()) +
                            " estimates");
  }
  const int n = observables_[0].dim();
  for (const auto& z : observables_) {
    if (z.dim() != n) throw DimensionMismatch("ConstraintSet: mixed observable dimensions");
  }
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);
  if ((observables_[0].matrix() - identity).cwiseAbs().maxCoeff() >
      numeric_config().hermiticity_tol) {
    throw Error("ConstraintSet: first observable must be the identity");
  }
  observables_[0] = HermitianMatrix::identity(n);
  if (std::abs(estimates_[0] - 1.0) > numeric_config().hermiticity_tol) {
    throw Error("ConstraintSet: first estimate must be 1 (unit trace)");
  }
  estimates_[0] = 1.0;
  if (reliability_) {
    if (reliability_->size() + 1 != observables_.size()) {
      throw DimensionMismatch("ConstraintSet: reliability must have one index per non-identity observable");
    }
    for (double d : *reliability_) {
      if (!(d > 0.0 && d <= 1.0)) {
        throw Error("ConstraintSet: reliability index " + std::to_string(d) +
                    " outside (0, 1]");
      }
    }
  }
}

Eigen::VectorXd ConstraintSet::estimates_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(estimates_.data(),
                                           static_cast<Eigen::Index>(estimates_.size()));
}

OrthonormalProblem::OrthonormalProblem(int dim, std::vector<HermitianMatrix> basis,
                                       std::vector<HermitianMatrix> completion,
                                       Eigen::VectorXd data, Eigen::MatrixXd transform)
    : dim_(dim),
      basis_(std::move(basis)),
      completion_(std::move(completion)),
      data_(std::move(data)),
      transform_(std::move(transform)),
      rho0_(HermitianMatrix::zero(dim)) {
  const auto m = static_cast<Eigen::Index>(basis_.size());
  if (data_.size() != m || transform_.rows() != m) {
    throw DimensionMismatch("OrthonormalProblem: inconsistent sizes");
  }
  if (basis_.size() + completion_.size() != static_cast<std::size_t>(dim_) * dim_) {
    throw DimensionMismatch("OrthonormalProblem: basis plus completion must span");
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (Eigen::Index i = 0; i < m; ++i) acc += data_(i) * basis_[i].matrix();
  rho0_ = HermitianMatrix(std::move(acc));
}

OrthonormalProblem OrthonormalProblem::with_data(const Eigen::VectorXd& new_data) const {
  if (new_data.size() != data_.size()) {
    throw DimensionMismatch("with_data: expected length " + std::to_string(data_.size()));
  }
  if (std::abs(new_data(0) - 1.0 / std::sqrt(double(dim_))) > 1e-12) {
    throw Error("with_data: first component must remain 1/sqrt(n)");
  }
  return OrthonormalProblem(dim_, basis_, completion_, new_data, transform_);
}

double default_dep_tol(int dim) { return 1e-9 * std::sqrt(double(dim)); }

OrthonormalProblem orthonormalize(const ConstraintSet& cs, double dep_tol) {
  const int n = cs.dim();
  const int p = cs.count();
  if (dep_tol < 0) dep_tol = default_dep_tol(n);

  const double root_n = std::sqrt(double(n));
  std::vector<HermitianMatrix> basis;
  std::vector<Eigen::RowVectorXd> rows;
  basis.push_back(HermitianMatrix::identity(n) * (1.0 / root_n));
  rows.emplace_back(Eigen::RowVectorXd::Zero(p));
  rows.back()(0) = 1.0 / root_n;

  for (int i = 1; i < p; ++i) {
    Eigen::MatrixXcd r = cs.observables()[i].matrix();
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(p, i);
    // Two passes of modified Gram-Schmidt; the row tracks the same linear
    // operations so that fbar = row * fhat stays exact.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t l = 0; l < basis.size(); ++l) {
        subtract_projection(r, &row, basis[l], &rows[l]);
      }
    }
    const double norm = r.norm();
    if (norm <= dep_tol) continue;  // linearly dependent, dropped
    basis.emplace_back(HermitianMatrix(r / norm));
    rows.emplace_back(row / norm);
  }

  const auto m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd transform(m, p);
  for (Eigen::Index i = 0; i < m; ++i) transform.row(i) = rows[static_cast<std::size_t>(i)];
  Eigen::VectorXd data = transform * cs.estimates_vector();

  std::vector<HermitianMatrix> completion = complete_basis(basis, n);
  return OrthonormalProblem(n, std::move(basis), std::move(completion),
                            std::move(data), std::move(transform));
}

std::vector<HermitianMatrix> complete_basis(const std::vector<HermitianMatrix>& x,
                                            int dim) {
  const std::size_t total = static_cast<std::size_t>(dim) * dim;
  if (x.size() > total) throw DimensionMismatch("complete_basis: too many basis elements");
  for (const auto& xi : x) {
    if (xi.dim() != dim) throw DimensionMismatch("complete_basis: dimension mismatch");
  }
  const std::size_t wanted = total - x.size();
  std::vector<HermitianMatrix> completion;
  if (wanted == 0) return completion;

  // Residuals of the canonical basis against the accepted set, updated
  // incrementally. Greedy max-residual pivoting keeps the selection
  // deterministic and well conditioned (some candidate always has residual
  // norm >= 1/n while the span is incomplete).
  std::vector<Eigen::MatrixXcd> residuals = canonical_hermitian_basis(dim);
  for (auto& r : residuals) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& xi : x) subtract_projection(r, nullptr, xi, nullptr);
    }
  }

  completion.reserve(wanted);
  while (completion.size() < wanted) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t c = 0; c < residuals.size(); ++c) {
      const double norm = residuals[c].norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = c;
      }
    }
    if (best_norm < 1e-8) {
      throw Error("complete_basis: span collapsed before completion (input not orthonormal?)");
    }
    Eigen::MatrixXcd accepted = residuals[best] / best_norm;
    // One clean-up pass against everything accepted so far.
    for (const auto& xi : x) subtract_projection(accepted, nullptr, xi, nullptr);
    for (const auto& yi : completion) subtract_projection(accepted, nullptr, yi, nullptr);
    accepted /= accepted.norm();
    completion.emplace_back(HermitianMatrix(std::move(accepted)));
    residuals.erase(residuals.begin() + static_cast<std::ptrdiff_t>(best));
    for (auto& r : residuals) {
      subtract_projection(r, nullptr, completion.back(), nullptr);
    }
  }
  return completion;
}

Eigen::VectorXd apply_L(const OrthonormalProblem& ob, const HermitianMatrix& rho) {
  if (rho.dim() != ob.dim()) throw DimensionMismatch("apply_L: dimension mismatch");
  Eigen::VectorXd out(ob.m());
  for (int i = 0; i < ob.m(); ++i) {
    out(i) = frobenius_inner(rho, ob.basis()[static_cast<std::size_t>(i)]);
  }
  return out;
}

HermitianMatrix apply_L_adjoint(const OrthonormalProblem& ob,
                                const Eigen::VectorXd& lambda) {
  if (lambda.size() != ob.m()) {
    throw DimensionMismatch("apply_L_adjoint: expected length " + std::to_string(ob.m()));
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(ob.dim(), ob.dim());
  for (int i = 0; i < ob.m(); ++i) {
    acc += lambda(i) * ob.basis()[static_cast<std::size_t>(i)].matrix();
  }
  return HermitianMatrix(std::move(acc));
}

}  // namespace qre
