#pragma once

#include <filesystem>
#include <string>

#include "qre/entropy.hpp"
#include "qre/rng.hpp"

namespace qre {

/// On-disk estimation problem. Observables are listed without the mandatory
/// identity constraint unless the file spells it out; to_constraint_set()
/// prepends it when missing.
struct ProblemFile {
  int dimension = 0;
  std::vector<std::string> names;
  std::vector<HermitianMatrix> observables;
  std::vector<double> estimates;
  std::optional<std::vector<double>> reliability;
  std::optional<HermitianMatrix> prior;  // absent: maxent (tau = I)
  PipelineConfig options{};

  ConstraintSet to_constraint_set() const;
  Prior to_prior() const;
};

ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);
std::string serialize_problem(const ProblemFile& pf, bool raw = false);

/// Synthetic tomography run: a true state measured either through observable
/// averages or through a POVM, a shot budget, and an explicit seed.
struct SimulationSpec {
  enum class Mode { Averages, Povm };

  int dimension = 0;
  HermitianMatrix true_state = HermitianMatrix::zero(1);
  Mode mode = Mode::Averages;
  std::vector<std::string> names;
  std::vector<HermitianMatrix> operators;  // observables or POVM effects
  long shots = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

SimulationSpec parse_simulation(const std::string& text);
SimulationSpec load_simulation(const std::filesystem::path& path);

struct SimulationResult {
  /// Per-constraint estimates: observable averages, or POVM outcome
  /// frequencies.
  Eigen::VectorXd estimates;
  /// Empirical outcome frequencies, one vector per observable (a single
  /// vector in POVM mode).
  std::vector<Eigen::VectorXd> frequencies;
  /// Empirical per-constraint outcome variances, for reliability indexes.
  Eigen::VectorXd variances;
};

/// Draw `shots` outcomes per measured quantity with the spec's seed and
/// return empirical estimates.
SimulationResult simulate_measurements(const SimulationSpec& spec);

/// Problem file assembled from a simulation; reliability indexes are the
/// normalized reciprocals of the empirical variances when requested.
ProblemFile problem_from_simulation(const SimulationSpec& spec,
                                    const SimulationResult& result,
                                    bool with_reliability);

/// G G^dagger / tr(G G^dagger) with G an n x rank matrix of seeded complex
/// standard normals; PSD, unit trace, rank `rank` almost surely.
HermitianMatrix random_density(int n, int rank, std::uint64_t seed);

// Result serialization (12 significant digits; raw: full precision).
std::string serialize_feasibility(const FeasibilityReport& report, int dimension,
                                  bool raw = false);
std::string serialize_estimation(const EstimationResult& result, int dimension,
                                 bool raw = false);

/// Relaxation summary: classification, contraction factor, and the measured
/// estimates pulled back through the relaxed pseudo-state.
struct RelaxationReport {
  Classification classification = Classification::FeasibleSingular;
  double mu = 0.0;
  RelaxationKind kind = RelaxationKind::None;
  double factor = 1.0;
  double k = 0.0;
  std::vector<double> relaxed_estimates;
  double resolved_mu = 0.0;
};

RelaxationReport relax_report(const ProblemFile& pf);
std::string serialize_relaxation(const RelaxationReport& report, bool raw = false);

}  // namespace qre
