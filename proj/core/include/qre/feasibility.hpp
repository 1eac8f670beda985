#pragma once

#include <cstdint>
#include <functional>

#include "qre/constraints.hpp"

namespace qre {

/// Outcome of the feasibility analysis.
enum class Classification {
  Infeasible,        // no state satisfies the constraints (mu > 0)
  FeasibleFullRank,  // at least one positive definite solution (mu < 0)
  FeasibleSingular,  // solutions exist but all are singular (mu ~ 0)
};

const char* to_string(Classification c);

/// Parameters of the log-det barrier method for the auxiliary
/// minimum-eigenvalue problem, plus the zero band used to classify mu.
struct BarrierConfig {
  double q0 = 10.0;         // initial barrier weight, > 0
  double beta = 1.5;        // outer growth factor, > 1
  double xi = 1e-8;         // target accuracy: stop once n/q < xi
  double newton_tol = 1e-10;  // inner stop on (Newton decrement)^2 / 2
  int max_outer = 200;
  int max_inner = 100;
  double ls_alpha = 0.25;   // Armijo fraction, in (0, 0.5)
  double ls_beta = 0.5;     // step shrink factor, in (0, 1)
  double zero_tol = 1e-6;   // |mu| band treated as zero in classify()

  void validate() const;
};

/// Result of the auxiliary minimum-eigenvalue solve. mu is certified to lie
/// in [mu_true, mu_true + accuracy].
struct FeasibilityReport {
  double mu = 0.0;
  Classification classification = Classification::FeasibleSingular;
  Eigen::VectorXd witness_v;        // minimizer, length n^2 - m + 1
  HermitianMatrix witness_matrix = HermitianMatrix::zero(1);  // H(witness_v), PSD
  double accuracy = 0.0;            // certified gap n/q_final
  int outer_iterations = 0;
  int newton_iterations = 0;
};

/// Invoked with each accepted Newton iterate (v, H(v)).
using IterateCallback =
    std::function<void(const Eigen::VectorXd&, const HermitianMatrix&)>;

/// Minimize c^T v subject to H(v) >= 0 over the completion directions plus
/// the identity direction, by damped Newton on the log-det barrier with an
/// outer weight schedule q <- beta q until n/q < xi.
FeasibilityReport solve_min_eigen(const OrthonormalProblem& ob,
                                  const BarrierConfig& cfg = {},
                                  const IterateCallback& on_iterate = nullptr);

Classification classify(double mu, double zero_tol);

/// Contract the traceless data by 1/(1 + sqrt(n) mu): the minimal uniform
/// shrink that makes an infeasible problem feasible. Requires an Infeasible
/// report; the relaxed problem has only singular solutions.
OrthonormalProblem relax_isotropic(const OrthonormalProblem& ob,
                                   const FeasibilityReport& report);

/// Amplify every non-identity estimate by k d_i (reliability indexes must be
/// present and k must exceed max 1/d_i). The caller re-transforms the data,
/// solves for mu', and contracts by 1/(1 + sqrt(n) mu'), so that noisier
/// estimates end up contracted more.
ConstraintSet relax_weighted(const ConstraintSet& cs, double k);

struct ProjectionOptions {
  double tol = 1e-10;          // stop on successive-iterate Frobenius change
  int max_iterations = 50000;  // then ProjectionNonConvergence
  bool polish = true;          // refine the active face to KKT accuracy
};

struct ProjectionStats {
  int dykstra_iterations = 0;
  double last_change = 0.0;
  int active_kernel_dim = 0;  // kernel dimension certified by the polish
  bool polished = false;
};

/// Frobenius projection of rho0 + sum_i u_i Y_i onto the solution set
/// S = {rho0 + sum_i w_i Y_i >= 0}. Dykstra alternating projections
/// (PSD clip / affine restore) refined by an active-face least-squares
/// polish with a KKT certificate.
HermitianMatrix project_to_solutions(const OrthonormalProblem& ob,
                                     const Eigen::VectorXd& u,
                                     const ProjectionOptions& opts = {},
                                     ProjectionStats* stats = nullptr);

/// Average of the Frobenius projections of num_projections seeded random
/// perturbations of the pseudo-state; has maximal rank among elements of S
/// with probability growing in num_projections.
HermitianMatrix minimal_kernel_solution(const OrthonormalProblem& ob,
                                        int num_projections, std::uint64_t seed,
                                        const ProjectionOptions& opts = {});

/// Thrown by the estimation pipeline when the problem is infeasible and
/// relaxation was not permitted.
class InfeasibleProblem : public Error {
 public:
  InfeasibleProblem(const std::string& what, FeasibilityReport report)
      : Error(what), report(std::move(report)) {}
  FeasibilityReport report;
};

}  // namespace qre
