#pragma once

#include "qre/feasibility.hpp"
#include "qre/reduction.hpp"

namespace qre {

/// A priori state: any positive definite Hermitian matrix (not necessarily
/// unit trace; scaling the prior does not change the estimate). Caches its
/// logarithm.
class Prior {
 public:
  explicit Prior(HermitianMatrix tau);

  /// Maximum-entropy prior: the identity.
  static Prior maxent(int dim);

  int dim() const { return tau_.dim(); }
  const HermitianMatrix& tau() const { return tau_; }
  const HermitianMatrix& log_tau() const { return log_tau_; }

 private:
  HermitianMatrix tau_;
  HermitianMatrix log_tau_;
};

/// Dual function evaluation at a multiplier lambda:
///   exponent A = log tau - I - L*(lambda),   rho = exp(A),
///   j = tr(rho) + <lambda, fbar>,            grad = fbar - L(rho),
/// where grad is the gradient of j. The spectral data of A is cached for the
/// Hessian.
struct DualState {
  Eigen::VectorXd lambda;
  double j = 0.0;
  Eigen::VectorXd grad;
  HermitianMatrix exponent = HermitianMatrix::zero(1);
  HermitianMatrix rho = HermitianMatrix::zero(1);
  EigenDecomposition exponent_eig;
  int iterations = 0;  // filled by solve_dual
};

DualState dual_eval(const OrthonormalProblem& ob, const Prior& prior,
                    const Eigen::VectorXd& lambda);

/// Exact dual Hessian via first divided differences of the exponential on
/// the eigenbasis of the exponent. Symmetric positive definite on R^m.
Eigen::MatrixXd dual_hessian(const DualState& ds, const OrthonormalProblem& ob);

struct DualConfig {
  double tol = 1e-9;       // stop on |fbar - L(rho)|_inf
  int max_iter = 200;
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
  double divergence_norm = 1e6;  // |lambda| beyond this means no PD solution
};

/// Newton with backtracking from lambda = 0 down to the unique minimizer of
/// the dual function. Requires a positive definite solution to exist.
DualState solve_dual(const OrthonormalProblem& ob, const Prior& prior,
                     const DualConfig& cfg = {});

/// Umegaki relative entropy S(rho || tau) with the 0 log 0 = 0 convention.
double relative_entropy(const HermitianMatrix& rho, const Prior& prior);

enum class RelaxationKind { None, Isotropic, Weighted };

const char* to_string(RelaxationKind kind);

struct PipelineConfig {
  BarrierConfig barrier{};
  DualConfig dual{};
  ProjectionOptions projection{};
  double dep_tol = -1.0;        // < 0: default 1e-9 sqrt(n)
  int num_projections = 8;
  std::uint64_t seed = 0;
  double relax_k = -1.0;        // < 0: default 2 max(1/d_i)
  double rank_tol_scale = 1e-9;
  bool allow_relaxation = true;
};

/// End product of the pipeline.
struct EstimationResult {
  HermitianMatrix rho_hat = HermitianMatrix::zero(1);  // full-dimension estimate
  Eigen::VectorXd lambda_opt;    // dual optimum of the problem solved
  double dual_value = 0.0;
  double relative_entropy = 0.0; // S(rho_hat || tau)
  double residual_inf = 0.0;     // |L(rho_hat) - fbar|_inf of the problem solved
  bool reduction_used = false;
  int support_dim = 0;
  RelaxationKind relaxation = RelaxationKind::None;
  double relaxation_factor = 1.0;
  double relax_k = 0.0;              // k used by weighted relaxation
  FeasibilityReport feasibility;     // initial feasibility solve
  double resolved_mu = 0.0;          // post-relaxation mu (0 when unused)
};

/// Full pipeline: orthonormalize, decide feasibility, relax if permitted and
/// required (weighted when reliability indexes are present), reduce onto the
/// common support when solutions are singular, and solve the entropic dual.
EstimationResult estimate(const ConstraintSet& cs, const Prior& prior,
                          const PipelineConfig& cfg = {});

}  // namespace qre
