#include "qre/entropy.hpp"

#include <cmath>

namespace qre {

Prior::Prior(HermitianMatrix tau)
    : tau_(std::move(tau)), log_tau_(HermitianMatrix::zero(tau_.dim())) {
  const double lam_min = min_eigenvalue(tau_);
  if (!(lam_min > 1e-12)) {
    throw NotPositiveDefinite("Prior: tau must be positive definite (lambda_min = " +
                                  std::to_string(lam_min) + ")",
                              lam_min);
  }
  log_tau_ = herm_log(tau_);
}

Prior Prior::maxent(int dim) { return Prior(HermitianMatrix::identity(dim)); }

DualState dual_eval(const OrthonormalProblem& ob, const Prior& prior,
                    const Eigen::VectorXd& lambda) {
  if (prior.dim() != ob.dim()) throw DimensionMismatch("dual_eval: prior dimension mismatch");
  if (lambda.size() != ob.m()) {
    throw DimensionMismatch("dual_eval: expected multiplier length " + std::to_string(ob.m()));
  }
  DualState ds;
  ds.lambda = lambda;
  ds.exponent = HermitianMatrix(prior.log_tau().matrix() -
                                Eigen::MatrixXcd::Identity(ob.dim(), ob.dim()) -
                                apply_L_adjoint(ob, lambda).matrix());
  ds.exponent_eig = eig(ds.exponent);
  const double max_eig = ds.exponent_eig.values(ob.dim() - 1);
  if (max_eig > 700.0) {
    throw OverflowRisk("dual_eval: exponent eigenvalue " + std::to_string(max_eig) +
                           " would overflow exp",
                       max_eig);
  }
  const Eigen::VectorXd exped = ds.exponent_eig.values.array().exp();
  ds.rho = HermitianMatrix(ds.exponent_eig.vectors * exped.asDiagonal() *
                           ds.exponent_eig.vectors.adjoint());
  ds.j = exped.sum() + lambda.dot(ob.data());
  ds.grad = ob.data() - apply_L(ob, ds.rho);
  return ds;
}

namespace {

/// First divided difference of exp: (e^a - e^b)/(a - b), continued across
/// the diagonal with the midpoint value to avoid cancellation.
double exp_divided_difference(double a, double b) {
  if (std::abs(a - b) < 1e-8) return std::exp(0.5 * (a + b));
  return (std::exp(a) - std::exp(b)) / (a - b);
}

}  // namespace

Eigen::MatrixXd dual_hessian(const DualState& ds, const OrthonormalProblem& ob) {
  const int n = ob.dim();
  const int m = ob.m();
  const Eigen::MatrixXcd& v = ds.exponent_eig.vectors;
  const Eigen::VectorXd& a = ds.exponent_eig.values;

  Eigen::MatrixXd phi(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) phi(k, l) = exp_divided_difference(a(k), a(l));
  }

  std::vector<Eigen::MatrixXcd> rotated(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    rotated[static_cast<std::size_t>(i)] =
        v.adjoint() * ob.basis()[static_cast<std::size_t>(i)].matrix() * v;
  }
  Eigen::MatrixXd hess(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double value = (rotated[static_cast<std::size_t>(i)].array() *
                            rotated[static_cast<std::size_t>(j)].array().conjugate() *
                            phi.array())
                               .sum()
                               .real();
      hess(i, j) = value;
      hess(j, i) = value;
    }
  }
  return hess;
}

DualState solve_dual(const OrthonormalProblem& ob, const Prior& prior,
                     const DualConfig& cfg) {
  DualState ds = dual_eval(ob, prior, Eigen::VectorXd::Zero(ob.m()));
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (ds.grad.lpNorm<Eigen::Infinity>() <= cfg.tol) {
      ds.iterations = it;
      return ds;
    }
    const Eigen::MatrixXd hess = dual_hessian(ds, ob);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hes(hess);
    Eigen::VectorXd step;
    const double lam_min = hes.eigenvalues()(0);
    const double lam_max = hes.eigenvalues()(ob.m() - 1);
    if (lam_min <= 0 || lam_max / lam_min > 1e12) {
      step = -ds.grad;  // gradient fallback near extreme data
    } else {
      step = hess.ldlt().solve(-ds.grad);
    }
    double slope = ds.grad.dot(step);
    if (!(slope < 0)) {
      step = -ds.grad;
      slope = -ds.grad.squaredNorm();
    }

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 200 && t >= 1e-18; ++ls) {
      try {
        DualState trial = dual_eval(ob, prior, ds.lambda + t * step);
        if (trial.j <= ds.j + cfg.ls_alpha * t * slope) {
          ds = std::move(trial);
          accepted = true;
          break;
        }
      } catch (const OverflowRisk&) {
        // exponent too large at this step length; shrink
      }
      t *= cfg.ls_beta;
    }
    if (!accepted) {
      throw LineSearchStall("solve_dual: line search stalled", t, it);
    }
    if (ds.lambda.norm() > cfg.divergence_norm) {
      throw NoFullRankSolution(
          "solve_dual: multipliers diverging (|lambda| > " +
          std::to_string(cfg.divergence_norm) +
          "); the constraints admit no full-rank solution - re-run the feasibility "
          "analysis and reduce");
    }
  }
  throw IterationCapExceeded(
      "solve_dual: Newton cap exceeded with residual " +
          std::to_string(ds.grad.lpNorm<Eigen::Infinity>()),
      std::vector<double>(ds.lambda.data(), ds.lambda.data() + ds.lambda.size()), ds.j,
      cfg.max_iter);
}

double relative_entropy(const HermitianMatrix& rho, const Prior& prior) {
  if (rho.dim() != prior.dim()) throw DimensionMismatch("relative_entropy: dimension mismatch");
  const EigenDecomposition d = eig(rho);
  double tr_rho_log_rho = 0.0;
  for (int k = 0; k < rho.dim(); ++k) {
    const double p = d.values(k);
    if (p > 1e-15) tr_rho_log_rho += p * std::log(p);
  }
  return tr_rho_log_rho - frobenius_inner(rho, prior.log_tau());
}

const char* to_string(RelaxationKind kind) {
  switch (kind) {
    case RelaxationKind::None: return "none";
    case RelaxationKind::Isotropic: return "isotropic";
    case RelaxationKind::Weighted: return "weighted";
  }
  return "unknown";
}

namespace {

/// Prior transported to the support: compress, then floor the spectrum so
/// the block stays safely loggable.
Prior compress_prior(const Prior& prior, const KernelDecomposition& kd) {
  const Eigen::MatrixXcd us = kd.support();
  HermitianMatrix block(us.adjoint() * prior.tau().matrix() * us);
  const EigenDecomposition d = eig(block);
  const double floor = 1e-10 * std::max(std::abs(d.values(0)),
                                        std::abs(d.values(block.dim() - 1)));
  const Eigen::VectorXd floored = d.values.cwiseMax(std::max(floor, 1e-11));
  return Prior(HermitianMatrix(d.vectors * floored.asDiagonal() * d.vectors.adjoint()));
}

}  // namespace

EstimationResult estimate(const ConstraintSet& cs, const Prior& prior,
                          const PipelineConfig& cfg) {
  if (prior.dim() != cs.dim()) throw DimensionMismatch("estimate: prior dimension mismatch");
  const int n = cs.dim();
  const double root_n = std::sqrt(double(n));

  OrthonormalProblem ob = orthonormalize(cs, cfg.dep_tol);
  const FeasibilityReport initial = solve_min_eigen(ob, cfg.barrier);

  EstimationResult result;
  result.support_dim = n;
  result.feasibility = initial;

  OrthonormalProblem work = ob;
  Classification state = initial.classification;

  if (state == Classification::Infeasible) {
    if (!cfg.allow_relaxation) {
      throw InfeasibleProblem("estimate: constraints are infeasible (mu = " +
                                  std::to_string(initial.mu) +
                                  ") and relaxation is not permitted",
                              initial);
    }
    if (cs.reliability()) {
      double k = cfg.relax_k;
      if (k < 0) {
        double bound = 0.0;
        for (double di : *cs.reliability()) bound = std::max(bound, 1.0 / di);
        k = 2.0 * bound;
      }
      const ConstraintSet amplified = relax_weighted(cs, k);
      const Eigen::VectorXd amp_data = ob.transform() * amplified.estimates_vector();
      const OrthonormalProblem amplified_ob = ob.with_data(amp_data);
      const FeasibilityReport amp_report = solve_min_eigen(amplified_ob, cfg.barrier);
      if (!(amp_report.mu > 0)) {
        throw NotInfeasible(
            "estimate: amplified problem became feasible; weighted relaxation "
            "inapplicable at k = " +
            std::to_string(k));
      }
      const double factor = 1.0 / (1.0 + root_n * amp_report.mu);
      Eigen::VectorXd relaxed = amp_data;
      relaxed.tail(relaxed.size() - 1) *= factor;
      work = ob.with_data(relaxed);
      result.relaxation = RelaxationKind::Weighted;
      result.relaxation_factor = factor;
      result.relax_k = k;
    } else {
      work = relax_isotropic(ob, initial);
      result.relaxation = RelaxationKind::Isotropic;
      result.relaxation_factor = 1.0 / (1.0 + root_n * initial.mu);
    }
    const FeasibilityReport resolved = solve_min_eigen(work, cfg.barrier);
    result.resolved_mu = resolved.mu;
    state = resolved.classification;
  }

  if (state == Classification::FeasibleFullRank) {
    DualState sol = solve_dual(work, prior, cfg.dual);
    result.rho_hat = sol.rho;
    result.lambda_opt = sol.lambda;
    result.dual_value = sol.j;
  } else {
    // All solutions are singular: locate the common kernel from a
    // maximal-rank element and solve on the support.
    const HermitianMatrix rho_bar =
        minimal_kernel_solution(work, cfg.num_projections, cfg.seed, cfg.projection);
    const KernelDecomposition kd =
        kernel_decomposition(rho_bar, n * cfg.rank_tol_scale * eig(rho_bar).values(n - 1));
    if (kd.support_dim == n) {
      DualState sol = solve_dual(work, prior, cfg.dual);
      result.rho_hat = sol.rho;
      result.lambda_opt = sol.lambda;
      result.dual_value = sol.j;
    } else {
      const ReducedProblem reduced = reduce_problem(work, kd);
      const Prior reduced_prior = compress_prior(prior, kd);
      DualState sol = solve_dual(reduced.problem, reduced_prior, cfg.dual);
      result.rho_hat = lift_solution(sol.rho, kd);
      result.lambda_opt = sol.lambda;
      result.dual_value = sol.j;
      result.reduction_used = true;
      result.support_dim = kd.support_dim;
    }
  }

  result.residual_inf =
      (apply_L(work, result.rho_hat) - work.data()).lpNorm<Eigen::Infinity>();
  result.relative_entropy = relative_entropy(result.rho_hat, prior);
  return result;
}

}  // namespace qre
