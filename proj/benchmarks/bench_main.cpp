#include <benchmark/benchmark.h>

#include "qre/entropy.hpp"
#include "qre/io.hpp"
#include "qre/rng.hpp"

using namespace qre;

namespace {

HermitianMatrix random_hermitian(int n, Rng& rng) {
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = std::complex<double>(rng.normal(), rng.normal());
  }
  return HermitianMatrix(m);
}

ConstraintSet random_instance(int n, int extra, std::uint64_t seed) {
  Rng rng(seed);
  const HermitianMatrix rho_true = random_density(n, n, seed + 1);
  std::vector<HermitianMatrix> obs{HermitianMatrix::identity(n)};
  std::vector<double> est{1.0};
  for (int i = 0; i < extra; ++i) {
    obs.push_back(random_hermitian(n, rng));
    est.push_back(frobenius_inner(rho_true, obs.back()));
  }
  return ConstraintSet(std::move(obs), std::move(est));
}

void bm_herm_exp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const HermitianMatrix a = random_hermitian(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(herm_exp(a));
}
BENCHMARK(bm_herm_exp)->Arg(4)->Arg(16)->Arg(64);

void bm_orthonormalize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConstraintSet cs = random_instance(n, 3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(orthonormalize(cs));
}
BENCHMARK(bm_orthonormalize)->Arg(2)->Arg(4)->Arg(8);

void bm_solve_min_eigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const OrthonormalProblem ob = orthonormalize(random_instance(n, 3, 11));
  for (auto _ : state) benchmark::DoNotOptimize(solve_min_eigen(ob));
}
BENCHMARK(bm_solve_min_eigen)->Arg(2)->Arg(3)->Arg(4);

void bm_solve_dual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const OrthonormalProblem ob = orthonormalize(random_instance(n, 3, 13));
  const Prior prior = Prior::maxent(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dual(ob, prior));
}
BENCHMARK(bm_solve_dual)->Arg(2)->Arg(4)->Arg(8);

void bm_projection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const OrthonormalProblem ob = orthonormalize(random_instance(n, 2, 17));
  Rng rng(19);
  const Eigen::VectorXd u = rng.normal_vector(n * n - ob.m());
  for (auto _ : state) benchmark::DoNotOptimize(project_to_solutions(ob, u));
}
BENCHMARK(bm_projection)->Arg(2)->Arg(3)->Arg(4);

void bm_estimate_pipeline(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConstraintSet cs = random_instance(n, 3, 23);
  const Prior prior = Prior::maxent(n);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(cs, prior));
}
BENCHMARK(bm_estimate_pipeline)->Arg(2)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
