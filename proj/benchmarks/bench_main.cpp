#include <benchmark/benchmark.h>

#include <random>

#include "levyspde/models.hpp"
#include "levyspde/solver.hpp"

using namespace levyspde;

namespace {

FamilySpec diagonal(double sigma) {
  FamilySpec f;
  f.family = CoefficientFamily::diagonal;
  f.sigma = {sigma};
  return f;
}

}  // namespace

static void BM_DyadicTrilinear(benchmark::State& state) {
  const DyadicShell model(DyadicShellParams{static_cast<std::size_t>(state.range(0)), 2.0, 0.01});
  std::mt19937_64 rng(1);
  const auto u = random_vector(model.basis(), rng), v = random_vector(model.basis(), rng),
             w = random_vector(model.basis(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.trilinear(u, v, w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DyadicTrilinear)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_NseApply(benchmark::State& state) {
  const auto model = make_nse2d(Nse2dParams{static_cast<int>(state.range(0)), 0.05, true}, 50, 1);
  std::mt19937_64 rng(2);
  const auto u = random_vector(model->basis(), rng), v = random_vector(model->basis(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(model->apply(u, v));
  state.counters["modes"] = static_cast<double>(model->dim());
}
BENCHMARK(BM_NseApply)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

static void BM_LinearStep(benchmark::State& state) {
  const DyadicShell model(DyadicShellParams{24, 2.0, 0.01});
  const auto measure = LevyMeasure::compound_gaussian(5.0, 0.1, 0.5);
  const CoefficientSpec coeff(diagonal(0.2), diagonal(0.1), measure, model.basis(), 24);
  SolverConfig cfg;
  const auto noise = sample_realization(cfg.grid(), measure, WienerDriverSpec{24}, 3);
  const System sys{model, coeff, noise};
  const Cutoff cut(10.0, 0.5);
  std::mt19937_64 rng(3);
  const auto y = random_vector(model.basis(), rng, 1.0), a = random_vector(model.basis(), rng, 1.0);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(linear_step(y, a, 0.1, k, sys, cut, Stepper::resolvent));
    k = (k + 1) % noise.grid().steps;
  }
}
BENCHMARK(BM_LinearStep);

static void BM_PicardWindow(benchmark::State& state) {
  const DyadicShell model(DyadicShellParams{12, 2.0, 0.01});
  const auto measure = LevyMeasure::compound_gaussian(5.0, 0.1, 0.5);
  const CoefficientSpec coeff(diagonal(0.2), diagonal(0.1), measure, model.basis(), 12);
  SolverConfig cfg;
  cfg.T = 0.1;
  cfg.dt = 0.001;
  cfg.record_diagnostics = state.range(0) != 0;
  const auto noise = sample_realization(cfg.grid(), measure, WienerDriverSpec{12}, 4);
  const System sys{model, coeff, noise};
  const Cutoff cut(cfg.m, cfg.delta0);
  GalerkinVector u0(12);
  u0[0] = 1.0;
  u0[1] = 0.5;
  for (auto _ : state) {
    auto res = picard_local(u0, 0, noise.grid().steps, sys, cfg, cut);
    state.counters["iterations"] = static_cast<double>(res.report.iterations_used);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_PicardWindow)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
