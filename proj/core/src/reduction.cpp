#include "qre/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qre {
namespace {

/// Phase convention: rotate each column so its largest-magnitude entry is
/// real and positive. Keeps U reproducible across algebraically equal inputs.
void fix_phases(Eigen::MatrixXcd& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index imax = 0;
    u.col(c).cwiseAbs().maxCoeff(&imax);
    const std::complex<double> pivot = u(imax, c);
    if (std::abs(pivot) > 0) u.col(c) *= std::conj(pivot) / std::abs(pivot);
  }
}

bool lex_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() < b(i).real()) return true;
    if (a(i).real() > b(i).real()) return false;
  }
  return false;
}

}  // namespace

KernelDecomposition kernel_decomposition(const HermitianMatrix& rho, double rank_tol) {
  const int n = rho.dim();
  const EigenDecomposition d = eig(rho);
  const double top = d.values(n - 1);
  if (rank_tol < 0) rank_tol = n * 1e-9 * top;
  if (!(top > rank_tol)) {
    throw DegenerateInput("kernel_decomposition: no eigenvalue above rank tolerance " +
                          std::to_string(rank_tol));
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Eigen::VectorXcd> cols(static_cast<std::size_t>(n));
  Eigen::MatrixXcd vectors = d.vectors;
  fix_phases(vectors);
  for (int i = 0; i < n; ++i) cols[static_cast<std::size_t>(i)] = vectors.col(i);

  const auto in_support = [&](int i) { return d.values(i) > rank_tol; };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool sa = in_support(a);
    const bool sb = in_support(b);
    if (sa != sb) return sa;  // support first
    if (d.values(a) != d.values(b)) return d.values(a) > d.values(b);
    return lex_less(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
  });

  KernelDecomposition kd;
  kd.u.resize(n, n);
  kd.rank_tol = rank_tol;
  kd.support_dim = 0;
  for (int i = 0; i < n; ++i) {
    kd.u.col(i) = cols[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    if (in_support(order[static_cast<std::size_t>(i)])) ++kd.support_dim;
  }
  return kd;
}

ReducedProblem reduce_problem(const OrthonormalProblem& ob,
                              const KernelDecomposition& kd) {
  if (kd.dim() != ob.dim()) throw DimensionMismatch("reduce_problem: dimension mismatch");
  const int n1 = kd.support_dim;
  const Eigen::MatrixXcd us = kd.support();

  // Compressed constraints tr(rho1 Xbar_i) = fbar_i. The first compresses to
  // I/sqrt(n) with value 1/sqrt(n); rescaled to the exact unit-trace
  // constraint the orthonormalizer expects.
  std::vector<HermitianMatrix> observables;
  std::vector<double> estimates;
  observables.reserve(static_cast<std::size_t>(ob.m()));
  estimates.reserve(static_cast<std::size_t>(ob.m()));
  observables.push_back(HermitianMatrix::identity(n1));
  estimates.push_back(1.0);
  for (int i = 1; i < ob.m(); ++i) {
    observables.emplace_back(
        HermitianMatrix(us.adjoint() * ob.basis()[static_cast<std::size_t>(i)].matrix() * us));
    estimates.push_back(ob.data()(i));
  }

  ConstraintSet reduced_cs(std::move(observables), std::move(estimates));
  return ReducedProblem{orthonormalize(reduced_cs, default_dep_tol(n1)), kd};
}

HermitianMatrix lift_solution(const HermitianMatrix& rho1,
                              const KernelDecomposition& kd) {
  if (rho1.dim() != kd.support_dim) {
    throw DimensionMismatch("lift_solution: state dimension " + std::to_string(rho1.dim()) +
                            " does not match support dimension " +
                            std::to_string(kd.support_dim));
  }
  const Eigen::MatrixXcd us = kd.support();
  return HermitianMatrix(us * rho1.matrix() * us.adjoint());
}

}  // namespace qre
