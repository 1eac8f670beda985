#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"

using namespace qre;
using namespace qre::test;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qre_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string qubit_problem(double fz) {
  ProblemFile pf;
  pf.dimension = 2;
  pf.names = {"sz"};
  pf.observables = {pauli_z()};
  pf.estimates = {fz};
  return serialize_problem(pf);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("feasibility subcommand reports mu and exits 2 on infeasible input") {
  TempDir tmp;
  const fs::path problem = tmp.path / "qubit_12.json";
  const fs::path out = tmp.path / "report.json";
  write_file(problem, qubit_problem(1.2));

  const int code = cli::run_cli({"feasibility", problem.string(), "--output", out.string()});
  CHECK(code == 2);
  const json j = read_json(out);
  CHECK(j["classification"] == "infeasible");
  CHECK(std::abs(j["mu"].get<double>() - 0.141421356237) < 1e-6);

  write_file(problem, qubit_problem(0.5));
  CHECK(cli::run_cli({"feasibility", problem.string(), "--output", out.string()}) == 0);
  CHECK(read_json(out)["classification"] == "feasible_full_rank");
}

TEST_CASE("estimate subcommand solves the feasible qubit") {
  TempDir tmp;
  const fs::path problem = tmp.path / "qubit_05.json";
  const fs::path out = tmp.path / "estimate.json";
  write_file(problem, qubit_problem(0.5));

  CHECK(cli::run_cli({"estimate", problem.string(), "--output", out.string()}) == 0);
  const json j = read_json(out);
  CHECK(std::abs(j["rho_hat"][0][0][0].get<double>() - 0.75) < 1e-8);
  CHECK(std::abs(j["rho_hat"][1][1][0].get<double>() - 0.25) < 1e-8);
  CHECK(j["residual_inf"].get<double>() < 1e-9);
  CHECK(j["relaxation"]["kind"] == "none");
}

TEST_CASE("estimate without --auto-relax exits 2; with it relaxes to the pure state") {
  TempDir tmp;
  const fs::path problem = tmp.path / "qubit_12.json";
  const fs::path out = tmp.path / "estimate.json";
  write_file(problem, qubit_problem(1.2));

  CHECK(cli::run_cli({"estimate", problem.string(), "--output", out.string()}) == 2);

  CHECK(cli::run_cli({"estimate", "--auto-relax", problem.string(), "--output",
                      out.string()}) == 0);
  const json j = read_json(out);
  CHECK(j["relaxation"]["kind"] == "isotropic");
  CHECK(std::abs(j["relaxation"]["factor"].get<double>() - 0.833333333333) < 1e-6);
  CHECK(std::abs(j["rho_hat"][0][0][0].get<double>() - 1.0) < 1e-6);
  CHECK(j["reduction"]["used"] == true);
  CHECK(j["reduction"]["support_dim"] == 1);
}

TEST_CASE("relax subcommand prints the contraction") {
  TempDir tmp;
  const fs::path problem = tmp.path / "qubit_12.json";
  const fs::path out = tmp.path / "relax.json";
  write_file(problem, qubit_problem(1.2));
  CHECK(cli::run_cli({"relax", problem.string(), "--output", out.string()}) == 0);
  const json j = read_json(out);
  CHECK(j["kind"] == "isotropic");
  CHECK(std::abs(j["factor"].get<double>() - 1.0 / 1.2) < 1e-6);
  CHECK(std::abs(j["relaxed_estimates"][1].get<double>() - 1.0) < 1e-6);
}

TEST_CASE("simulate subcommand emits an estimable problem file") {
  TempDir tmp;
  const fs::path sim = tmp.path / "sim.json";
  const fs::path problem = tmp.path / "problem.json";
  const fs::path out = tmp.path / "estimate.json";

  json spec;
  spec["dimension"] = 2;
  spec["mode"] = "averages";
  spec["true_state"] = {{{0.75, 0.0}, {0.1, 0.05}}, {{0.1, -0.05}, {0.25, 0.0}}};
  spec["observables"] = {
      json{{"name", "sx"}, {"matrix", {{{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}}}},
      json{{"name", "sy"}, {"matrix", {{{0, 0}, {0, -1}}, {{0, 1}, {0, 0}}}}},
      json{{"name", "sz"}, {"matrix", {{{1, 0}, {0, 0}}, {{0, 0}, {-1, 0}}}}}};
  spec["shots"] = 100000;
  spec["seed"] = 17;
  write_file(sim, spec.dump(2));

  CHECK(cli::run_cli({"simulate", sim.string(), "--reliability", "--output",
                      problem.string()}) == 0);
  const json pj = read_json(problem);
  CHECK(pj["estimates"].size() == 3);
  CHECK(pj["reliability"].size() == 3);
  CHECK(pj["options"]["seed"] == 17);

  CHECK(cli::run_cli({"estimate", "--auto-relax", problem.string(), "--output",
                      out.string()}) == 0);
  const json ej = read_json(out);
  // Near the true state at this shot budget.
  CHECK(std::abs(ej["rho_hat"][0][0][0].get<double>() - 0.75) < 0.02);
  CHECK(std::abs(ej["rho_hat"][0][1][0].get<double>() - 0.1) < 0.02);
}

TEST_CASE("seeded CLI runs are bit-identical") {
  TempDir tmp;
  const fs::path sim = tmp.path / "sim.json";
  json spec;
  spec["dimension"] = 2;
  spec["mode"] = "povm";
  spec["true_state"] = {{{0.9, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.1, 0.0}}};
  spec["effects"] = {json{{"matrix", {{{1, 0}, {0, 0}}, {{0, 0}, {0, 0}}}}},
                     json{{"matrix", {{{0, 0}, {0, 0}}, {{0, 0}, {1, 0}}}}}};
  spec["shots"] = 4096;
  spec["seed"] = 5;
  write_file(sim, spec.dump());

  const fs::path out1 = tmp.path / "a.json";
  const fs::path out2 = tmp.path / "b.json";
  CHECK(cli::run_cli({"simulate", sim.string(), "--output", out1.string()}) == 0);
  CHECK(cli::run_cli({"simulate", sim.string(), "--output", out2.string()}) == 0);
  std::ifstream f1(out1), f2(out2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(!s1.str().empty());
}

TEST_CASE("parse failures exit 1 with diagnostics") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.json";
  write_file(bad, "{ not json");
  CHECK(cli::run_cli({"estimate", bad.string()}) == 1);
  CHECK(cli::run_cli({"estimate", (tmp.path / "missing.json").string()}) == 1);
  CHECK(cli::run_cli({"bogus-subcommand"}) == 1);
}

TEST_CASE("batch mode estimates a directory") {
  TempDir tmp;
  write_file(tmp.path / "a.json", qubit_problem(0.5));
  write_file(tmp.path / "b.json", qubit_problem(-0.25));
  const int code = cli::run_cli({"estimate", "--batch", "--auto-relax", tmp.path.string()});
  CHECK(code == 0);
  CHECK(fs::exists(tmp.path / "a.result.json"));
  CHECK(fs::exists(tmp.path / "b.result.json"));
  const json a = read_json(tmp.path / "a.result.json");
  CHECK(std::abs(a["rho_hat"][0][0][0].get<double>() - 0.75) < 1e-8);

  // One infeasible file without --auto-relax surfaces exit code 2.
  write_file(tmp.path / "c.json", qubit_problem(1.5));
  CHECK(cli::run_cli({"estimate", "--batch", tmp.path.string()}) == 2);
}

TEST_CASE("raw output keeps full precision") {
  TempDir tmp;
  const fs::path problem = tmp.path / "qubit.json";
  const fs::path out12 = tmp.path / "p12.json";
  const fs::path outraw = tmp.path / "praw.json";
  write_file(problem, qubit_problem(1.0 / 3.0));
  CHECK(cli::run_cli({"estimate", problem.string(), "--output", out12.string()}) == 0);
  CHECK(cli::run_cli({"estimate", problem.string(), "--raw", "--output", outraw.string()}) == 0);
  const double v12 = read_json(out12)["rho_hat"][0][0][0].get<double>();
  const double vraw = read_json(outraw)["rho_hat"][0][0][0].get<double>();
  // Both near (1 + 1/3)/2; the raw one carries more digits.
  CHECK(std::abs(v12 - vraw) < 1e-11);
  CHECK(v12 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}
