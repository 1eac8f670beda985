#include <cmath>
#include <optional>

#include "qre/feasibility.hpp"

namespace qre {
namespace {

/// Orthonormal basis of the k x k Hermitian matrices (diagonal units, then
/// symmetric / antisymmetric pairs).
std::vector<Eigen::MatrixXcd> hermitian_unit_basis(int k) {
  std::vector<Eigen::MatrixXcd> basis;
  const double s = 1.0 / std::sqrt(2.0);
  const std::complex<double> ii{0.0, 1.0};
  for (int a = 0; a < k; ++a) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(k, k);
    e(a, a) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(k, k);
      sym(a, b) = s;
      sym(b, a) = s;
      basis.push_back(std::move(sym));
      Eigen::MatrixXcd anti = Eigen::MatrixXcd::Zero(k, k);
      anti(a, b) = ii * s;
      anti(b, a) = -ii * s;
      basis.push_back(std::move(anti));
    }
  }
  return basis;
}

struct Workspace {
  const OrthonormalProblem& ob;
  int n;
  int d;

  explicit Workspace(const OrthonormalProblem& problem)
      : ob(problem), n(problem.dim()), d(problem.dim() * problem.dim() - problem.m()) {}

  Eigen::MatrixXcd assemble(const Eigen::VectorXd& w) const {
    Eigen::MatrixXcd h = ob.pseudo_state().matrix();
    for (int i = 0; i < d; ++i) {
      h += w(i) * ob.completion()[static_cast<std::size_t>(i)].matrix();
    }
    return h;
  }

  /// Completion-direction coefficients of a Hermitian matrix.
  Eigen::VectorXd coefficients(const Eigen::MatrixXcd& m) const {
    Eigen::VectorXd w(d);
    for (int i = 0; i < d; ++i) {
      const auto& y = ob.completion()[static_cast<std::size_t>(i)].matrix();
      w(i) = (m.array() * y.array().conjugate()).sum().real();
    }
    return w;
  }
};

Eigen::MatrixXcd psd_clip(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw EigenFailure("psd_clip: eigensolver failed");
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

/// Packs the complex n x k matrix equation sum_i w_i (Y_i V) = -R V into a
/// real least-squares system.
void pack_face_system(const Workspace& ws, const Eigen::MatrixXcd& v_kernel,
                      Eigen::MatrixXd& m, Eigen::VectorXd& b) {
  const int k = static_cast<int>(v_kernel.cols());
  const int half = ws.n * k;
  m.resize(2 * half, ws.d);
  b.resize(2 * half);
  for (int i = 0; i < ws.d; ++i) {
    const Eigen::MatrixXcd g =
        ws.ob.completion()[static_cast<std::size_t>(i)].matrix() * v_kernel;
    const Eigen::MatrixXd gr = g.real();
    const Eigen::MatrixXd gi = g.imag();
    m.col(i).head(half) = Eigen::Map<const Eigen::VectorXd>(gr.data(), half);
    m.col(i).tail(half) = Eigen::Map<const Eigen::VectorXd>(gi.data(), half);
  }
  const Eigen::MatrixXcd rv = -(ws.ob.pseudo_state().matrix() * v_kernel);
  const Eigen::MatrixXd br = rv.real();
  const Eigen::MatrixXd bi = rv.imag();
  b.head(half) = Eigen::Map<const Eigen::VectorXd>(br.data(), half);
  b.tail(half) = Eigen::Map<const Eigen::VectorXd>(bi.data(), half);
}

struct FaceResult {
  Eigen::VectorXd w;
  Eigen::MatrixXcd h;
};

/// Attempt the projection assuming an active kernel of dimension k seeded by
/// the given eigenbasis: minimize |w - u| subject to H(w) annihilating the
/// kernel, refining the kernel subspace to a fixed point, then certify the
/// KKT conditions (primal feasibility and a PSD multiplier supported on the
/// kernel).
std::optional<FaceResult> attempt_face(const Workspace& ws, const Eigen::VectorXd& u,
                                       int k, const Eigen::MatrixXcd& eigvecs) {
  const double feas_tol = 1e-9;
  const double kkt_tol = 1e-7;

  if (k == 0) {
    const Eigen::MatrixXcd h = ws.assemble(u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.eigenvalues()(0) >= -feas_tol * (1.0 + std::abs(es.eigenvalues()(ws.n - 1)))) {
      return FaceResult{u, h};
    }
    return std::nullopt;
  }

  Eigen::MatrixXcd v_kernel = eigvecs.leftCols(k);
  Eigen::VectorXd w = u;
  Eigen::MatrixXcd h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  Eigen::MatrixXd sys;
  Eigen::VectorXd rhs;
  for (int round = 0; round < 12; ++round) {
    pack_face_system(ws, v_kernel, sys, rhs);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys);
    const Eigen::VectorXd delta = cod.solve(rhs - sys * u);
    const Eigen::VectorXd w_new = u + delta;
    if ((sys * w_new - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
      return std::nullopt;  // no element of the data plane kills this subspace
    }
    const double change = (w_new - w).norm();
    w = w_new;
    h = ws.assemble(w);
    es.compute(h);
    if (es.info() != Eigen::Success) return std::nullopt;
    v_kernel = es.eigenvectors().leftCols(k);
    if (round > 0 && change <= 1e-13 * (1.0 + w.norm())) break;
  }

  // Primal feasibility: the engineered kernel is exact, so any eigenvalue
  // materially below zero lives in the support block.
  const double scale = 1.0 + std::abs(es.eigenvalues()(ws.n - 1));
  if (es.eigenvalues()(0) < -feas_tol * scale) return std::nullopt;

  // Multiplier: tr(Lambda Y_i) = (w - u)_i with Lambda = V C V^dagger >= 0.
  const auto basis = hermitian_unit_basis(k);
  const int unknowns = static_cast<int>(basis.size());
  Eigen::MatrixXd a(ws.d, unknowns);
  for (int i = 0; i < ws.d; ++i) {
    const Eigen::MatrixXcd wi =
        v_kernel.adjoint() * ws.ob.completion()[static_cast<std::size_t>(i)].matrix() * v_kernel;
    for (int c = 0; c < unknowns; ++c) {
      a(i, c) = (basis[static_cast<std::size_t>(c)].array() * wi.array().conjugate())
                    .sum()
                    .real();
    }
  }
  const Eigen::VectorXd target = w - u;
  const Eigen::VectorXd theta =
      a.completeOrthogonalDecomposition().solve(target);
  if ((a * theta - target).lpNorm<Eigen::Infinity>() >
      kkt_tol * (1.0 + target.lpNorm<Eigen::Infinity>())) {
    return std::nullopt;
  }
  Eigen::MatrixXcd c_mat = Eigen::MatrixXcd::Zero(k, k);
  for (int c = 0; c < unknowns; ++c) c_mat += theta(c) * basis[static_cast<std::size_t>(c)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ces(c_mat);
  if (ces.eigenvalues()(0) < -kkt_tol * (1.0 + c_mat.norm())) return std::nullopt;

  return FaceResult{w, h};
}

/// Kernel-size candidates ordered around the spectral guess.
std::vector<int> face_candidates(const Eigen::VectorXd& evals, int n) {
  const double top = std::max(1.0, std::abs(evals(n - 1)));
  int guess = 0;
  while (guess < n - 1 && evals(guess) < 1e-5 * top) ++guess;
  std::vector<int> order;
  order.push_back(guess);
  for (int offset = 1; offset < n; ++offset) {
    if (guess - offset >= 0) order.push_back(guess - offset);
    if (guess + offset <= n - 1) order.push_back(guess + offset);
  }
  return order;
}

std::optional<FaceResult> polish(const Workspace& ws, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ws.assemble(w));
  if (es.info() != Eigen::Success) return std::nullopt;
  for (int k : face_candidates(es.eigenvalues(), ws.n)) {
    if (auto result = attempt_face(ws, u, k, es.eigenvectors())) {
      return result;
    }
  }
  return std::nullopt;
}

bool is_checkpoint(int iteration) {
  return iteration == 8 || iteration == 64 || iteration == 256 ||
         iteration == 1024 || iteration == 4096 || iteration == 16384;
}

}  // namespace

HermitianMatrix project_to_solutions(const OrthonormalProblem& ob,
                                     const Eigen::VectorXd& u,
                                     const ProjectionOptions& opts,
                                     ProjectionStats* stats) {
  Workspace ws(ob);
  if (u.size() != ws.d) {
    throw DimensionMismatch("project_to_solutions: expected coefficient length " +
                            std::to_string(ws.d));
  }
  if (ws.d == 0) return ob.pseudo_state();

  // Dykstra between the PSD cone and the data plane; the plane projection
  // needs no correction term.
  Eigen::VectorXd w = u;
  Eigen::MatrixXcd correction = Eigen::MatrixXcd::Zero(ws.n, ws.n);
  double change = 0.0;
  int it = 0;
  for (it = 0; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXcd x = ws.assemble(w);
    const Eigen::MatrixXcd clipped = psd_clip(x + correction);
    correction = x + correction - clipped;
    const Eigen::VectorXd w_new = ws.coefficients(clipped);
    change = (w_new - w).norm();
    w = w_new;

    const bool converged = change <= opts.tol;
    if (opts.polish &&
        (is_checkpoint(it + 1) || converged || it + 1 == opts.max_iterations)) {
      if (auto result = polish(ws, u, w)) {
        if (stats) {
          stats->dykstra_iterations = it + 1;
          stats->last_change = change;
          stats->polished = true;
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(result->h);
          int k = 0;
          const double top = std::max(1.0, std::abs(es.eigenvalues()(ws.n - 1)));
          while (k < ws.n && es.eigenvalues()(k) < 1e-7 * top) ++k;
          stats->active_kernel_dim = k;
        }
        return HermitianMatrix(result->h);
      }
    }
    if (converged) {
      // Uncertified but stationary to the Dykstra stop rule; accept only a
      // point that is essentially inside the cone.
      const Eigen::MatrixXcd h = ws.assemble(w);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
      if (es.eigenvalues()(0) >= -1e-8) {
        if (stats) {
          stats->dykstra_iterations = it + 1;
          stats->last_change = change;
          stats->polished = false;
        }
        return HermitianMatrix(h);
      }
      break;
    }
  }
  throw ProjectionNonConvergence(
      "project_to_solutions: no certified projection after " + std::to_string(it) +
          " iterations (last change " + std::to_string(change) + ")",
      it, change);
}

}  // namespace qre
