// Serial vs OpenMP kernels, and the circulant estimator vs the dense SVD route.

#include <benchmark/benchmark.h>

#include <random>

#include "wmn/estimators.hpp"
#include "wmn/interpolation.hpp"
#include "wmn/montecarlo.hpp"

namespace {

using namespace wmn;

void BM_EmpiricalRisk(benchmark::State& state, Execution exec) {
  const auto s = build_spectrum(1024, 1.0);
  const auto g = classify_grid(1024, 64, 256);
  McConfig mc;
  mc.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_risk(s, g, 1.0, mc, exec).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_EmpiricalRisk, serial, Execution::Serial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EmpiricalRisk, parallel, Execution::Parallel)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EmpiricalRiskReference(benchmark::State& state) {
  const auto s = build_spectrum(256, 1.0);
  const auto g = classify_grid(256, 16, 64);
  McConfig mc;
  mc.trials = 20;
  for (auto _ : state) benchmark::DoNotOptimize(reference::empirical_risk(s, g, 1.0, mc).mean);
}
BENCHMARK(BM_EmpiricalRiskReference)->Unit(benchmark::kMillisecond);

Interpolant random_interpolant(std::size_t d, std::size_t p_axis) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Interpolant f;
  f.d = d;
  f.p_axis = p_axis;
  std::size_t P = 1;
  for (std::size_t a = 0; a < d; ++a) P *= p_axis;
  f.coefficients.resize(static_cast<Eigen::Index>(P));
  for (auto& c : f.coefficients) c = cplx(g(rng), g(rng));
  return f;
}

void BM_Evaluate(benchmark::State& state, Execution exec) {
  const auto f = random_interpolant(2, 41);
  const auto pts = sample_points(2, 100, f.domain);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_interpolant(f, pts, exec).data());
}
BENCHMARK_CAPTURE(BM_Evaluate, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Evaluate, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);

void BM_EvaluateReference(benchmark::State& state) {
  const auto f = random_interpolant(2, 41);
  const auto pts = sample_points(2, 30, f.domain);
  for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate_interpolant(f, pts).data());
}
BENCHMARK(BM_EvaluateReference)->Unit(benchmark::kMillisecond);

void BM_MinNorm(benchmark::State& state, SolverPath path) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto s = build_spectrum(16 * n, 1.0);
  const auto g = classify_grid(16 * n, n, 4 * n);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  CVector y(static_cast<Eigen::Index>(n));
  for (auto& v : y) v = cplx(normal(rng), normal(rng));
  for (auto _ : state) benchmark::DoNotOptimize(weighted_minnorm(y, s, g, 1.0, path).residual);
}
BENCHMARK_CAPTURE(BM_MinNorm, circulant, SolverPath::CirculantFFT)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_MinNorm, dense_svd, SolverPath::DenseSVD)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
