#include "qre/feasibility.hpp"

#include <cmath>

#include "qre/rng.hpp"

namespace qre {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Infeasible: return "infeasible";
    case Classification::FeasibleFullRank: return "feasible_full_rank";
    case Classification::FeasibleSingular: return "feasible_singular";
  }
  return "unknown";
}

void BarrierConfig::validate() const {
  if (!(q0 > 0)) throw Error("BarrierConfig: q0 must be positive");
  if (!(beta > 1)) throw Error("BarrierConfig: beta must exceed 1");
  if (!(xi > 0)) throw Error("BarrierConfig: xi must be positive");
  if (!(newton_tol > 0)) throw Error("BarrierConfig: newton_tol must be positive");
  if (max_outer < 1 || max_inner < 1) throw Error("BarrierConfig: iteration caps must be >= 1");
  if (!(ls_alpha > 0 && ls_alpha < 0.5)) throw Error("BarrierConfig: ls_alpha outside (0, 0.5)");
  if (!(ls_beta > 0 && ls_beta < 1)) throw Error("BarrierConfig: ls_beta outside (0, 1)");
  if (!(zero_tol > 0)) throw Error("BarrierConfig: zero_tol must be positive");
  if (xi > zero_tol / 10) {
    throw Error("BarrierConfig: xi must be at most zero_tol/10 so the classification band is certified");
  }
}

namespace {

struct BarrierProblem {
  // Directions Y_1..Y_d followed by X_1; the objective picks out the last
  // coordinate.
  std::vector<const Eigen::MatrixXcd*> directions;
  Eigen::MatrixXcd base;
  int n = 0;

  Eigen::MatrixXcd assemble(const Eigen::VectorXd& v) const {
    Eigen::MatrixXcd h = base;
    for (std::size_t i = 0; i < directions.size(); ++i) {
      h += v(static_cast<Eigen::Index>(i)) * (*directions[i]);
    }
    return h;
  }
};

double real_trace_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  // tr(ab) with b Hermitian.
  return (a.array() * b.array().conjugate()).sum().real();
}

}  // namespace

FeasibilityReport solve_min_eigen(const OrthonormalProblem& ob,
                                  const BarrierConfig& cfg,
                                  const IterateCallback& on_iterate) {
  cfg.validate();
  const int n = ob.dim();
  const int d = n * n - ob.m();
  const int dim = d + 1;

  BarrierProblem bp;
  bp.n = n;
  bp.base = ob.pseudo_state().matrix();
  bp.directions.reserve(static_cast<std::size_t>(dim));
  for (const auto& y : ob.completion()) bp.directions.push_back(&y.matrix());
  bp.directions.push_back(&ob.basis()[0].matrix());

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v(d) = std::sqrt(double(n)) * (-min_eigenvalue(ob.pseudo_state()) + 1.0);

  double q = cfg.q0;
  int total_newton = 0;
  int outer = 0;
  double gap = n / q;

  Eigen::MatrixXcd h = bp.assemble(v);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw EigenFailure("solve_min_eigen: eigensolver failed");

  for (outer = 0; outer < cfg.max_outer; ++outer) {
    // Center g_q(v) = q c^T v - log det H(v) by damped Newton.
    bool centered = false;
    for (int inner = 0; inner < cfg.max_inner; ++inner) {
      const Eigen::VectorXd vals = es.eigenvalues();
      const Eigen::MatrixXcd& vecs = es.eigenvectors();
      const double g_now = q * v(d) - vals.array().log().sum();

      // M_i = H^{-1/2} B_i H^{-1/2} gives grad_i = q c_i - tr(M_i) and an
      // exactly symmetric PSD Hessian tr(M_i M_j).
      const Eigen::VectorXd inv_sqrt = vals.array().rsqrt();
      const Eigen::MatrixXcd s = vecs * inv_sqrt.asDiagonal() * vecs.adjoint();
      std::vector<Eigen::MatrixXcd> scaled(static_cast<std::size_t>(dim));
      Eigen::VectorXd grad(dim);
      for (int i = 0; i < dim; ++i) {
        scaled[static_cast<std::size_t>(i)] = s * (*bp.directions[static_cast<std::size_t>(i)]) * s;
        grad(i) = (i == d ? q : 0.0) - scaled[static_cast<std::size_t>(i)].trace().real();
      }
      Eigen::MatrixXd hess(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
          const double t = real_trace_product(scaled[static_cast<std::size_t>(i)],
                                              scaled[static_cast<std::size_t>(j)]);
          hess(i, j) = t;
          hess(j, i) = t;
        }
      }

      Eigen::VectorXd step = hess.ldlt().solve(-grad);
      double decrement2 = -grad.dot(step);
      if (!step.allFinite() || decrement2 < 0) {
        // Ill-conditioned system: regularize and retry once.
        const double reg = 1e-12 * (1.0 + hess.trace() / dim);
        step = (hess + reg * Eigen::MatrixXd::Identity(dim, dim)).ldlt().solve(-grad);
        decrement2 = -grad.dot(step);
        if (!step.allFinite() || decrement2 < 0) {
          step = -grad;
          decrement2 = grad.squaredNorm();
        }
      }
      if (decrement2 / 2 <= cfg.newton_tol) {
        centered = true;
        break;
      }

      const double slope = grad.dot(step);
      double t = 1.0;
      bool accepted = false;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_trial;
      for (int ls = 0; ls < 200; ++ls) {
        if (t < 1e-20) break;
        const Eigen::VectorXd v_t = v + t * step;
        const Eigen::MatrixXcd h_t = bp.assemble(v_t);
        es_trial.compute(h_t);
        if (es_trial.info() != Eigen::Success) {
          t *= 0.5;
          continue;
        }
        if (es_trial.eigenvalues()(0) <= 0) {
          // Outside the cone: halve until interior.
          t *= 0.5;
          continue;
        }
        const double g_t = q * v_t(d) - es_trial.eigenvalues().array().log().sum();
        if (g_t <= g_now + cfg.ls_alpha * t * slope) {
          v = v_t;
          h = h_t;
          es = es_trial;
          accepted = true;
          break;
        }
        t *= cfg.ls_beta;
      }
      if (!accepted) {
        throw LineSearchStall("solve_min_eigen: line search stalled at step " +
                                  std::to_string(t),
                              t, total_newton);
      }
      ++total_newton;
      if (on_iterate) on_iterate(v, HermitianMatrix(h));
      if (inner == cfg.max_inner - 1) {
        throw IterationCapExceeded(
            "solve_min_eigen: inner Newton cap exceeded",
            std::vector<double>(v.data(), v.data() + v.size()), v(d), total_newton);
      }
    }
    (void)centered;

    gap = n / q;
    if (gap < cfg.xi) break;
    q *= cfg.beta;
    if (outer == cfg.max_outer - 1) {
      throw IterationCapExceeded(
          "solve_min_eigen: outer barrier cap exceeded",
          std::vector<double>(v.data(), v.data() + v.size()), v(d), total_newton);
    }
  }

  FeasibilityReport report;
  report.mu = v(d);
  report.classification = classify(report.mu, cfg.zero_tol);
  report.witness_v = v;
  report.witness_matrix = HermitianMatrix(h);
  report.accuracy = gap;
  report.outer_iterations = outer + 1;
  report.newton_iterations = total_newton;
  return report;
}

Classification classify(double mu, double zero_tol) {
  if (mu > zero_tol) return Classification::Infeasible;
  if (mu < -zero_tol) return Classification::FeasibleFullRank;
  return Classification::FeasibleSingular;
}

OrthonormalProblem relax_isotropic(const OrthonormalProblem& ob,
                                   const FeasibilityReport& report) {
  if (report.classification != Classification::Infeasible || !(report.mu > 0)) {
    throw NotInfeasible("relax_isotropic: problem is not infeasible (mu = " +
                        std::to_string(report.mu) + ")");
  }
  const double factor = 1.0 / (1.0 + std::sqrt(double(ob.dim())) * report.mu);
  Eigen::VectorXd data = ob.data();
  data.tail(data.size() - 1) *= factor;
  return ob.with_data(data);
}

ConstraintSet relax_weighted(const ConstraintSet& cs, double k) {
  if (!cs.reliability()) {
    throw MissingReliability("relax_weighted: constraint set carries no reliability indexes");
  }
  const auto& d = *cs.reliability();
  double bound = 0.0;
  for (double di : d) bound = std::max(bound, 1.0 / di);
  if (!(k > bound)) {
    throw KTooSmall("relax_weighted: k = " + std::to_string(k) +
                        " must exceed max 1/d_i = " + std::to_string(bound),
                    k, bound);
  }
  std::vector<double> amplified = cs.estimates();
  for (std::size_t i = 1; i < amplified.size(); ++i) {
    amplified[i] *= k * d[i - 1];
  }
  return ConstraintSet(cs.observables(), std::move(amplified), cs.reliability());
}

HermitianMatrix minimal_kernel_solution(const OrthonormalProblem& ob,
                                        int num_projections, std::uint64_t seed,
                                        const ProjectionOptions& opts) {
  if (num_projections < 1) throw Error("minimal_kernel_solution: need at least one projection");
  const int d = ob.dim() * ob.dim() - ob.m();
  if (d == 0) return ob.pseudo_state();  // constraints pin a single matrix

  Rng rng(seed);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(ob.dim(), ob.dim());
  for (int j = 0; j < num_projections; ++j) {
    const Eigen::VectorXd u = rng.normal_vector(d);
    acc += project_to_solutions(ob, u, opts).matrix();
  }
  return HermitianMatrix(acc / num_projections);
}

}  // namespace qre
