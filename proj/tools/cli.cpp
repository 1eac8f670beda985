#include "cli.hpp"

#include <atomic>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "qre/io.hpp"

namespace qre::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

void deliver(const std::string& text, const std::string& output_path) {
  std::cout << text;
  if (!output_path.empty()) {
    std::ofstream out(output_path);
    if (!out) throw Error("cannot write " + output_path);
    out << text;
  }
}

int run_feasibility(const std::string& path, const std::string& output, bool raw) {
  const ProblemFile pf = load_problem(path);
  const OrthonormalProblem ob = orthonormalize(pf.to_constraint_set(), pf.options.dep_tol);
  const FeasibilityReport report = solve_min_eigen(ob, pf.options.barrier);
  deliver(serialize_feasibility(report, pf.dimension, raw), output);
  return report.classification == Classification::Infeasible ? kInfeasible : kOk;
}

int run_estimate_one(const fs::path& path, const std::string& output, bool raw,
                     bool auto_relax, std::string* rendered) {
  const ProblemFile pf = load_problem(path);
  PipelineConfig cfg = pf.options;
  cfg.allow_relaxation = auto_relax;
  try {
    const EstimationResult result = estimate(pf.to_constraint_set(), pf.to_prior(), cfg);
    const std::string text = serialize_estimation(result, pf.dimension, raw);
    if (rendered) {
      *rendered = text;
    } else {
      deliver(text, output);
    }
    return kOk;
  } catch (const InfeasibleProblem& e) {
    const std::string text = serialize_feasibility(e.report, pf.dimension, raw);
    if (rendered) {
      *rendered = text;
    } else {
      std::cerr << "infeasible without --auto-relax: " << e.what() << "\n";
      deliver(text, output);
    }
    return kInfeasible;
  }
}

int env_thread_cap() {
  const char* value = std::getenv("QRE_NUM_THREADS");
  if (!value) return 1;
  const int parsed = std::atoi(value);
  return parsed > 0 ? parsed : 1;
}

int run_estimate_batch(const fs::path& dir, const std::string& output, bool raw,
                       bool auto_relax) {
  if (!fs::is_directory(dir)) throw Error("--batch expects a directory, got " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    if (p.extension() == ".json" && p.string().find(".result.json") == std::string::npos) {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  const fs::path out_dir = output.empty() ? dir : fs::path(output);
  fs::create_directories(out_dir);

  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kOk};
  std::mutex log_mutex;
  const int threads = std::min<int>(env_thread_cap(), std::max<std::size_t>(files.size(), 1));

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      const fs::path& file = files[i];
      std::string status;
      int code = kOk;
      std::string text;
      try {
        code = run_estimate_one(file, "", raw, auto_relax, &text);
        status = code == kOk ? "ok" : "infeasible";
      } catch (const std::exception& e) {
        code = kError;
        status = std::string("error: ") + e.what();
      }
      if (!text.empty()) {
        fs::path out = out_dir / file.filename();
        out.replace_extension(".result.json");
        std::ofstream of(out);
        of << text;
      }
      // Errors dominate the exit code, then unrelaxed infeasibility.
      int seen = worst.load();
      const auto severity = [](int c) { return c == kError ? 2 : (c == kInfeasible ? 1 : 0); };
      while (severity(code) > severity(seen) && !worst.compare_exchange_weak(seen, code)) {
      }
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cout << file.filename().string() << ": " << status << "\n";
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

int run_relax(const std::string& path, const std::string& output, bool raw) {
  const ProblemFile pf = load_problem(path);
  deliver(serialize_relaxation(relax_report(pf), raw), output);
  return kOk;
}

int run_simulate(const std::string& path, const std::string& output, bool raw,
                 bool reliability) {
  const SimulationSpec spec = load_simulation(path);
  const SimulationResult result = simulate_measurements(spec);
  const ProblemFile pf = problem_from_simulation(spec, result, reliability);
  deliver(serialize_problem(pf, raw), output);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Density-matrix reconstruction by minimum relative entropy"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  bool raw = false;
  bool auto_relax = false;
  bool batch = false;
  bool reliability = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", input, "problem or simulation file")->required();
    sub->add_option("--output", output, "also write the result to this path");
    sub->add_flag("--raw", raw, "full machine precision instead of 12 significant digits");
  };

  CLI::App* feas = app.add_subcommand("feasibility", "decide whether the constraints admit a state");
  add_common(feas);
  CLI::App* est = app.add_subcommand("estimate", "reconstruct the state");
  add_common(est);
  est->add_flag("--auto-relax", auto_relax, "relax infeasible constraints instead of exiting 2");
  est->add_flag("--batch", batch, "treat input as a directory of problem files");
  CLI::App* rel = app.add_subcommand("relax", "report the minimal constraint relaxation");
  add_common(rel);
  CLI::App* sim = app.add_subcommand("simulate", "generate a problem file from a simulated experiment");
  add_common(sim);
  sim->add_flag("--reliability", reliability, "emit reliability indexes from empirical variances");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (feas->parsed()) return run_feasibility(input, output, raw);
    if (est->parsed()) {
      if (batch) return run_estimate_batch(input, output, raw, auto_relax);
      return run_estimate_one(input, output, raw, auto_relax, nullptr);
    }
    if (rel->parsed()) return run_relax(input, output, raw);
    if (sim->parsed()) return run_simulate(input, output, raw, reliability);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace qre::cli
