#include <benchmark/benchmark.h>

#include <vector>

#include "qghjm/explosion_criteria.hpp"
#include "qghjm/sde_engine.hpp"

using namespace qghjm;

namespace {

ModelParams lognormal(double beta) {
  ModelParams p;
  p.sigma = 0.2;
  p.beta = beta;
  p.lambda0 = 0.1;
  return p;
}

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_SimulateBatch(benchmark::State& state) {
  const auto curve = ForwardCurve::flat(0.1);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 20.0;
  cfg.n_paths = 2000;
  cfg.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_batch(lognormal(0.0), curve, cfg, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps());
}

void BM_VerifyGenerator(benchmark::State& state) {
  const auto p = lognormal(0.05);
  const auto spec = build_lyapunov(p, check_condition(p, Condition::II));
  VerifyGrid grid;
  grid.n = 400;
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_generator_inequality(spec, p, grid, mode(state)));
  }
}

void BM_RegionCurve(benchmark::State& state) {
  std::vector<double> sigmas;
  for (int i = 0; i < 145; ++i) sigmas.push_back(0.01 * (i + 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(region_curve(0.75, sigmas, mode(state)));
  }
}

}  // namespace

// Arg 0 = serial reference, 1 = OpenMP
BENCHMARK(BM_SimulateBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyGenerator)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegionCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
