#include "qre/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qre {
namespace {

using nlohmann::json;

double round_sig(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

double emit(double v, bool raw) { return raw ? v : round_sig(v, 12); }

json matrix_to_json(const Eigen::MatrixXcd& m, bool raw) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({emit(m(r, c).real(), raw), emit(m(r, c).imag(), raw)});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v, bool raw) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(emit(v(i), raw));
  return out;
}

std::complex<double> entry_from_json(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw ParseError(where + ": matrix entry must be a number or a [re, im] pair");
}

Eigen::MatrixXcd matrix_from_json(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ParseError(where + ": expected " + std::to_string(dim) + " matrix rows");
  }
  Eigen::MatrixXcd m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw ParseError(where + ", row " + std::to_string(r) + ": expected " +
                       std::to_string(dim) + " entries");
    }
    for (int c = 0; c < dim; ++c) {
      m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)],
                                where + ", entry (" + std::to_string(r) + "," +
                                    std::to_string(c) + ")");
    }
  }
  const double scale = 1.0 + m.norm();
  if ((m - m.adjoint().eval()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ParseError(where + ": matrix is not Hermitian");
  }
  return m;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n');
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
}

int parse_dimension(const json& j) {
  if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
    throw ParseError("field 'dimension': required positive integer");
  }
  const int dim = j["dimension"].get<int>();
  if (dim < 1) throw ParseError("field 'dimension': must be >= 1");
  return dim;
}

void parse_operator_list(const json& list, int dim, const std::string& field,
                         std::vector<std::string>& names,
                         std::vector<HermitianMatrix>& out) {
  if (!list.is_array() || list.empty()) {
    throw ParseError("field '" + field + "': required non-empty array");
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& item = list[i];
    const std::string where = "field '" + field + "[" + std::to_string(i) + "]'";
    if (item.is_object()) {
      if (!item.contains("matrix")) throw ParseError(where + ": missing 'matrix'");
      names.push_back(item.value("name", field.substr(0, 1) + std::to_string(i + 1)));
      out.emplace_back(HermitianMatrix(matrix_from_json(item["matrix"], dim, where)));
    } else {
      names.push_back(field.substr(0, 1) + std::to_string(i + 1));
      out.emplace_back(HermitianMatrix(matrix_from_json(item, dim, where)));
    }
  }
}

void parse_options(const json& j, PipelineConfig& cfg) {
  if (!j.is_object()) throw ParseError("field 'options': must be an object");
  if (j.contains("barrier")) {
    const json& b = j["barrier"];
    cfg.barrier.q0 = b.value("q0", cfg.barrier.q0);
    cfg.barrier.beta = b.value("beta", cfg.barrier.beta);
    cfg.barrier.xi = b.value("xi", cfg.barrier.xi);
    cfg.barrier.newton_tol = b.value("newton_tol", cfg.barrier.newton_tol);
    cfg.barrier.max_outer = b.value("max_outer", cfg.barrier.max_outer);
    cfg.barrier.max_inner = b.value("max_inner", cfg.barrier.max_inner);
    cfg.barrier.ls_alpha = b.value("ls_alpha", cfg.barrier.ls_alpha);
    cfg.barrier.ls_beta = b.value("ls_beta", cfg.barrier.ls_beta);
    cfg.barrier.zero_tol = b.value("zero_tol", cfg.barrier.zero_tol);
  }
  if (j.contains("dual")) {
    const json& d = j["dual"];
    cfg.dual.tol = d.value("tol", cfg.dual.tol);
    cfg.dual.max_iter = d.value("max_iter", cfg.dual.max_iter);
  }
  cfg.dep_tol = j.value("dep_tol", cfg.dep_tol);
  cfg.num_projections = j.value("num_projections", cfg.num_projections);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.relax_k = j.value("relax_k", cfg.relax_k);
  cfg.rank_tol_scale = j.value("rank_tol_scale", cfg.rank_tol_scale);
}

json options_to_json(const PipelineConfig& cfg) {
  // Only the fields that steer reproducibility; solver knobs are emitted when
  // they differ from the defaults.
  json j;
  j["seed"] = cfg.seed;
  const PipelineConfig defaults{};
  if (cfg.num_projections != defaults.num_projections) j["num_projections"] = cfg.num_projections;
  if (cfg.dep_tol != defaults.dep_tol) j["dep_tol"] = cfg.dep_tol;
  if (cfg.relax_k != defaults.relax_k) j["relax_k"] = cfg.relax_k;
  if (cfg.rank_tol_scale != defaults.rank_tol_scale) j["rank_tol_scale"] = cfg.rank_tol_scale;
  if (cfg.barrier.xi != defaults.barrier.xi || cfg.barrier.zero_tol != defaults.barrier.zero_tol) {
    j["barrier"] = {{"xi", cfg.barrier.xi}, {"zero_tol", cfg.barrier.zero_tol}};
  }
  if (cfg.dual.tol != defaults.dual.tol) j["dual"] = {{"tol", cfg.dual.tol}};
  return j;
}

bool is_identity(const HermitianMatrix& m) {
  return (m.matrix() - Eigen::MatrixXcd::Identity(m.dim(), m.dim())).cwiseAbs().maxCoeff() <=
         1e-12;
}

void sanitize_probabilities(Eigen::VectorXd& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < -1e-10) {
      throw Error("simulate_measurements: outcome probability " + std::to_string(p(i)) +
                  " negative beyond clip tolerance");
    }
    p(i) = std::min(std::max(p(i), 0.0), 1.0);
  }
  const double total = p.sum();
  if (std::abs(total - 1.0) > 1e-10) {
    if (!(total > 0)) throw Error("simulate_measurements: probabilities sum to zero");
    p /= total;
  }
}

Eigen::VectorXd draw_frequencies(Rng& rng, const Eigen::VectorXd& probs, long shots) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(probs.size());
  for (long s = 0; s < shots; ++s) counts(rng.categorical(probs)) += 1.0;
  return counts / static_cast<double>(shots);
}

}  // namespace

ConstraintSet ProblemFile::to_constraint_set() const {
  std::vector<HermitianMatrix> obs;
  std::vector<double> est;
  const bool has_identity = !observables.empty() && is_identity(observables.front());
  if (!has_identity) {
    obs.push_back(HermitianMatrix::identity(dimension));
    est.push_back(1.0);
  }
  obs.insert(obs.end(), observables.begin(), observables.end());
  est.insert(est.end(), estimates.begin(), estimates.end());
  return ConstraintSet(std::move(obs), std::move(est), reliability);
}

Prior ProblemFile::to_prior() const {
  return prior ? Prior(*prior) : Prior::maxent(dimension);
}

ProblemFile parse_problem(const std::string& text) {
  const json j = parse_text(text);
  ProblemFile pf;
  pf.dimension = parse_dimension(j);
  if (!j.contains("observables")) throw ParseError("field 'observables': required");
  parse_operator_list(j["observables"], pf.dimension, "observables", pf.names,
                      pf.observables);
  if (!j.contains("estimates") || !j["estimates"].is_array()) {
    throw ParseError("field 'estimates': required array");
  }
  for (const auto& e : j["estimates"]) {
    if (!e.is_number()) throw ParseError("field 'estimates': entries must be numbers");
    pf.estimates.push_back(e.get<double>());
  }
  if (pf.estimates.size() != pf.observables.size()) {
    throw ParseError("field 'estimates': length " + std::to_string(pf.estimates.size()) +
                     " does not match " + std::to_string(pf.observables.size()) +
                     " observables");
  }
  if (j.contains("reliability") && !j["reliability"].is_null()) {
    if (!j["reliability"].is_array()) throw ParseError("field 'reliability': must be an array");
    std::vector<double> rel;
    for (const auto& e : j["reliability"]) {
      if (!e.is_number()) throw ParseError("field 'reliability': entries must be numbers");
      rel.push_back(e.get<double>());
    }
    pf.reliability = std::move(rel);
  }
  if (j.contains("prior") && !j["prior"].is_null()) {
    if (j["prior"].is_string()) {
      if (j["prior"].get<std::string>() != "maxent") {
        throw ParseError("field 'prior': unknown keyword '" +
                         j["prior"].get<std::string>() + "' (expected \"maxent\" or a matrix)");
      }
    } else {
      pf.prior = HermitianMatrix(matrix_from_json(j["prior"], pf.dimension, "field 'prior'"));
    }
  }
  if (j.contains("options")) parse_options(j["options"], pf.options);
  return pf;
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string serialize_problem(const ProblemFile& pf, bool raw) {
  (void)raw;
  json j;
  j["dimension"] = pf.dimension;
  json obs = json::array();
  for (std::size_t i = 0; i < pf.observables.size(); ++i) {
    // Data files keep full precision so that parse/serialize round-trips.
    obs.push_back({{"name", i < pf.names.size() ? pf.names[i] : "Z" + std::to_string(i + 1)},
                   {"matrix", matrix_to_json(pf.observables[i].matrix(), true)}});
  }
  j["observables"] = std::move(obs);
  j["estimates"] = pf.estimates;
  if (pf.reliability) j["reliability"] = *pf.reliability;
  if (pf.prior) {
    j["prior"] = matrix_to_json(pf.prior->matrix(), true);
  } else {
    j["prior"] = "maxent";
  }
  j["options"] = options_to_json(pf.options);
  return j.dump(2) + "\n";
}

void SimulationSpec::validate() const {
  if (dimension < 1) throw Error("SimulationSpec: dimension must be >= 1");
  if (true_state.dim() != dimension) throw DimensionMismatch("SimulationSpec: state dimension");
  if (shots < 1) throw Error("SimulationSpec: shots must be >= 1");
  if (operators.empty()) throw Error("SimulationSpec: no measurement operators");
  for (const auto& op : operators) {
    if (op.dim() != dimension) throw DimensionMismatch("SimulationSpec: operator dimension");
  }
  if (min_eigenvalue(true_state) < -1e-10 || std::abs(true_state.trace() - 1.0) > 1e-10) {
    throw Error("SimulationSpec: true_state must be PSD with unit trace");
  }
  if (mode == Mode::Povm) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dimension, dimension);
    for (const auto& q : operators) {
      if (min_eigenvalue(q) < -1e-10) {
        throw InvalidPovm("SimulationSpec: POVM effect with negative eigenvalue");
      }
      sum += q.matrix();
    }
    if ((sum - Eigen::MatrixXcd::Identity(dimension, dimension)).norm() > 1e-10) {
      throw InvalidPovm("SimulationSpec: POVM effects do not sum to the identity");
    }
  }
}

SimulationSpec parse_simulation(const std::string& text) {
  const json j = parse_text(text);
  SimulationSpec spec;
  spec.dimension = parse_dimension(j);
  if (!j.contains("true_state")) throw ParseError("field 'true_state': required");
  spec.true_state =
      HermitianMatrix(matrix_from_json(j["true_state"], spec.dimension, "field 'true_state'"));
  const std::string mode = j.value("mode", std::string("averages"));
  if (mode == "averages") {
    spec.mode = SimulationSpec::Mode::Averages;
    if (!j.contains("observables")) throw ParseError("field 'observables': required in averages mode");
    parse_operator_list(j["observables"], spec.dimension, "observables", spec.names,
                        spec.operators);
  } else if (mode == "povm") {
    spec.mode = SimulationSpec::Mode::Povm;
    if (!j.contains("effects")) throw ParseError("field 'effects': required in povm mode");
    parse_operator_list(j["effects"], spec.dimension, "effects", spec.names, spec.operators);
  } else {
    throw ParseError("field 'mode': expected \"averages\" or \"povm\"");
  }
  if (!j.contains("shots") || !j["shots"].is_number_integer()) {
    throw ParseError("field 'shots': required positive integer");
  }
  spec.shots = j["shots"].get<long>();
  if (!j.contains("seed") || !j["seed"].is_number_integer()) {
    throw ParseError("field 'seed': required (randomness is always explicitly seeded)");
  }
  spec.seed = j["seed"].get<std::uint64_t>();
  spec.validate();
  return spec;
}

SimulationSpec load_simulation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_simulation(ss.str());
}

SimulationResult simulate_measurements(const SimulationSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SimulationResult result;

  if (spec.mode == SimulationSpec::Mode::Povm) {
    const auto outcomes = static_cast<Eigen::Index>(spec.operators.size());
    Eigen::VectorXd probs(outcomes);
    for (Eigen::Index k = 0; k < outcomes; ++k) {
      probs(k) = frobenius_inner(spec.true_state, spec.operators[static_cast<std::size_t>(k)]);
    }
    sanitize_probabilities(probs);
    const Eigen::VectorXd freq = draw_frequencies(rng, probs, spec.shots);
    result.estimates = freq;
    result.frequencies.push_back(freq);
    result.variances = freq.array() * (1.0 - freq.array());
    return result;
  }

  const auto count = static_cast<Eigen::Index>(spec.operators.size());
  result.estimates.resize(count);
  result.variances.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const EigenDecomposition d = eig(spec.operators[static_cast<std::size_t>(i)]);
    Eigen::VectorXd probs(spec.dimension);
    for (int k = 0; k < spec.dimension; ++k) {
      probs(k) =
          (d.vectors.col(k).adjoint() * spec.true_state.matrix() * d.vectors.col(k))(0, 0)
              .real();
    }
    sanitize_probabilities(probs);
    const Eigen::VectorXd freq = draw_frequencies(rng, probs, spec.shots);
    const double mean = d.values.dot(freq);
    result.estimates(i) = mean;
    result.variances(i) = d.values.array().square().matrix().dot(freq) - mean * mean;
    result.frequencies.push_back(freq);
  }
  return result;
}

ProblemFile problem_from_simulation(const SimulationSpec& spec,
                                    const SimulationResult& result,
                                    bool with_reliability) {
  ProblemFile pf;
  pf.dimension = spec.dimension;
  pf.names = spec.names;
  pf.observables = spec.operators;
  pf.estimates.assign(result.estimates.data(),
                      result.estimates.data() + result.estimates.size());
  if (with_reliability) {
    Eigen::VectorXd weight =
        (static_cast<double>(spec.shots) * result.variances.cwiseMax(1e-12)).cwiseInverse();
    const double top = weight.maxCoeff();
    std::vector<double> rel(static_cast<std::size_t>(weight.size()));
    for (Eigen::Index i = 0; i < weight.size(); ++i) {
      rel[static_cast<std::size_t>(i)] = std::min(1.0, weight(i) / top);
    }
    pf.reliability = std::move(rel);
  }
  pf.options.seed = spec.seed;
  return pf;
}

HermitianMatrix random_density(int n, int rank, std::uint64_t seed) {
  if (rank < 1 || rank > n) {
    throw Error("random_density: rank " + std::to_string(rank) + " outside [1, " +
                std::to_string(n) + "]");
  }
  Rng rng(seed);
  Eigen::MatrixXcd g(n, rank);
  const double s = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < rank; ++c) {
      g(r, c) = std::complex<double>(rng.normal() * s, rng.normal() * s);
    }
  }
  Eigen::MatrixXcd m = g * g.adjoint();
  m /= m.trace().real();
  return HermitianMatrix(std::move(m));
}

std::string serialize_feasibility(const FeasibilityReport& report, int dimension,
                                  bool raw) {
  json j;
  j["dimension"] = dimension;
  j["mu"] = emit(report.mu, raw);
  j["classification"] = to_string(report.classification);
  j["accuracy"] = emit(report.accuracy, raw);
  j["witness_v"] = vector_to_json(report.witness_v, raw);
  j["witness_matrix"] = matrix_to_json(report.witness_matrix.matrix(), raw);
  j["outer_iterations"] = report.outer_iterations;
  j["newton_iterations"] = report.newton_iterations;
  return j.dump(2) + "\n";
}

std::string serialize_estimation(const EstimationResult& result, int dimension,
                                 bool raw) {
  json j;
  j["dimension"] = dimension;
  j["rho_hat"] = matrix_to_json(result.rho_hat.matrix(), raw);
  j["lambda_opt"] = vector_to_json(result.lambda_opt, raw);
  j["dual_value"] = emit(result.dual_value, raw);
  j["relative_entropy"] = emit(result.relative_entropy, raw);
  j["residual_inf"] = emit(result.residual_inf, raw);
  j["reduction"] = {{"used", result.reduction_used}, {"support_dim", result.support_dim}};
  json relax;
  relax["kind"] = to_string(result.relaxation);
  relax["factor"] = emit(result.relaxation_factor, raw);
  if (result.relaxation == RelaxationKind::Weighted) relax["k"] = emit(result.relax_k, raw);
  if (result.relaxation != RelaxationKind::None) {
    relax["resolved_mu"] = emit(result.resolved_mu, raw);
  }
  j["relaxation"] = std::move(relax);
  j["feasibility"] = {{"mu", emit(result.feasibility.mu, raw)},
                      {"classification", to_string(result.feasibility.classification)},
                      {"accuracy", emit(result.feasibility.accuracy, raw)}};
  return j.dump(2) + "\n";
}

RelaxationReport relax_report(const ProblemFile& pf) {
  const ConstraintSet cs = pf.to_constraint_set();
  const OrthonormalProblem ob = orthonormalize(cs, pf.options.dep_tol);
  const FeasibilityReport rep = solve_min_eigen(ob, pf.options.barrier);
  const double root_n = std::sqrt(double(cs.dim()));

  RelaxationReport out;
  out.classification = rep.classification;
  out.mu = rep.mu;

  OrthonormalProblem relaxed = ob;
  if (rep.classification == Classification::Infeasible) {
    if (cs.reliability()) {
      double k = pf.options.relax_k;
      if (k < 0) {
        double bound = 0.0;
        for (double di : *cs.reliability()) bound = std::max(bound, 1.0 / di);
        k = 2.0 * bound;
      }
      const ConstraintSet amplified = relax_weighted(cs, k);
      const Eigen::VectorXd amp_data = ob.transform() * amplified.estimates_vector();
      const FeasibilityReport amp_rep = solve_min_eigen(ob.with_data(amp_data), pf.options.barrier);
      if (!(amp_rep.mu > 0)) {
        throw NotInfeasible("relax: amplified problem became feasible at k = " +
                            std::to_string(k));
      }
      out.kind = RelaxationKind::Weighted;
      out.factor = 1.0 / (1.0 + root_n * amp_rep.mu);
      out.k = k;
      Eigen::VectorXd data = amp_data;
      data.tail(data.size() - 1) *= out.factor;
      relaxed = ob.with_data(data);
    } else {
      out.kind = RelaxationKind::Isotropic;
      out.factor = 1.0 / (1.0 + root_n * rep.mu);
      relaxed = relax_isotropic(ob, rep);
    }
    out.resolved_mu = solve_min_eigen(relaxed, pf.options.barrier).mu;
  } else {
    out.kind = RelaxationKind::None;
    out.factor = 1.0;
    out.resolved_mu = rep.mu;
  }

  // Effective estimates of the original observables under the relaxed data:
  // every retained Z_i lies in the span of the X basis, so its value is
  // pinned by the relaxed pseudo-state.
  out.relaxed_estimates.reserve(static_cast<std::size_t>(cs.count()));
  for (int i = 0; i < cs.count(); ++i) {
    out.relaxed_estimates.push_back(frobenius_inner(
        relaxed.pseudo_state(), cs.observables()[static_cast<std::size_t>(i)]));
  }
  return out;
}

std::string serialize_relaxation(const RelaxationReport& report, bool raw) {
  json j;
  j["classification"] = to_string(report.classification);
  j["mu"] = emit(report.mu, raw);
  j["kind"] = to_string(report.kind);
  j["factor"] = emit(report.factor, raw);
  if (report.kind == RelaxationKind::Weighted) j["k"] = emit(report.k, raw);
  json est = json::array();
  for (double e : report.relaxed_estimates) est.push_back(emit(e, raw));
  j["relaxed_estimates"] = std::move(est);
  j["resolved_mu"] = emit(report.resolved_mu, raw);
  return j.dump(2) + "\n";
}

}  // namespace qre
