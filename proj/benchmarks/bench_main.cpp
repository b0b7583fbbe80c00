#include <benchmark/benchmark.h>

#include "quantest/adaptive.hpp"
#include "quantest/design.hpp"
#include "quantest/distributions.hpp"
#include "quantest/quantizer.hpp"
#include "quantest/sim.hpp"
#include "quantest/specfun.hpp"

using namespace quantest;

static void BM_InverseIncompleteBeta(benchmark::State& state) {
  double p = 0.013;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_incomplete_beta(p, 5.0 / 6.0, 0.5));
    p = p > 0.9 ? 0.013 : p + 0.0371;
  }
}
BENCHMARK(BM_InverseIncompleteBeta);

static void BM_LowerIncompleteGamma(benchmark::State& state) {
  double y = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lower_incomplete_gamma(1.0 / 3.0, y));
    y = y > 20 ? 0.01 : y * 1.7;
  }
}
BENCHMARK(BM_LowerIncompleteGamma);

static void BM_QuantizedFi(benchmark::State& state) {
  const DesignSpec spec{Distribution::student(1.0), ParamKind::Location, static_cast<int>(state.range(0))};
  const Quantizer q = practical_thresholds(spec);
  for (auto _ : state) benchmark::DoNotOptimize(quantized_fi(q, spec.dist, spec.kind));
}
BENCHMARK(BM_QuantizedFi)->Arg(4)->Arg(8);

static void BM_PracticalThresholds(benchmark::State& state) {
  const DesignSpec spec{Distribution::ggd(2.0), ParamKind::Scale, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(practical_thresholds(spec));
}
BENCHMARK(BM_PracticalThresholds)->Arg(4)->Arg(8);

static void BM_NumericDesign(benchmark::State& state) {
  const DesignSpec spec{Distribution::student(3.0), ParamKind::Location, 5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(thresholds_from_density_numeric(optimal_density_numeric(spec), spec.intervals()));
  }
}
BENCHMARK(BM_NumericDesign)->Unit(benchmark::kMillisecond);

static void BM_ExhaustiveSearch(benchmark::State& state) {
  const DesignSpec spec{Distribution::ggd(2.0), ParamKind::Location, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_optimal_thresholds(spec, true));
}
BENCHMARK(BM_ExhaustiveSearch)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_Sample(benchmark::State& state) {
  const Distribution d = state.range(0) == 0 ? Distribution::ggd(2.0) : Distribution::student(1.0);
  Sampler s(d);
  RandomStream rng = split_stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s(rng));
}
BENCHMARK(BM_Sample)->Arg(0)->Arg(1);

static void BM_StepLocation(benchmark::State& state) {
  const DesignSpec spec{Distribution::ggd(2.0), ParamKind::Location, 4};
  const StaticQuantizerSpec s = make_static_quantizer(spec);
  Sampler sampler(spec.dist);
  RandomStream rng = split_stream(1, 0);
  EstimatorState st = initial_state(EstimatorMode::LocationOnly, 1.0, 1.0);
  for (auto _ : state) {
    if (st.k > 1000000) st = initial_state(EstimatorMode::LocationOnly, 1.0, 1.0);
    st = step_location(st, s, sampler(rng), 1.0);
  }
  benchmark::DoNotOptimize(st);
}
BENCHMARK(BM_StepLocation);

static void BM_Simulation(benchmark::State& state) {
  SimConfig cfg = figure_config(EstimatorMode::Joint, Distribution::ggd(2.0), 4);
  cfg.realizations = 16;
  cfg.block_length = 10000;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.realizations * cfg.block_length));
}
BENCHMARK(BM_Simulation)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
