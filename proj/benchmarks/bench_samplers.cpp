#include <benchmark/benchmark.h>

#include <vector>

#include "lrdx/heavy_tails.hpp"
#include "lrdx/limits.hpp"
#include "lrdx/process.hpp"
#include "lrdx/renewal.hpp"
#include "lrdx/stable.hpp"

using namespace lrdx;

static void BM_Epoch(benchmark::State& state) {
  const EpochLaw law(0.6);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(law.sample(rng));
}
BENCHMARK(BM_Epoch);

static void BM_ReturnSet(benchmark::State& state) {
  const WindowSampler window(EpochLaw(0.6), state.range(0));
  Rng rng(2);
  std::vector<std::int64_t> pts;
  for (auto _ : state) {
    window.sample_into(rng, pts);
    benchmark::DoNotOptimize(pts.data());
  }
}
BENCHMARK(BM_ReturnSet)->Arg(1000)->Arg(100000);

static void BM_StableMarginal(benchmark::State& state) {
  const StableParams p(0.6);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_stable_marginal(p, rng));
}
BENCHMARK(BM_StableMarginal);

static void BM_QuantileV(benchmark::State& state) {
  const TailModel m = state.range(0) == 0 ? TailModel::log_normal(2.0) : TailModel::super_log_normal(1, 0.5);
  double z = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.quantile_V(z));
    z = z < 1e12 ? z * 1.7 : 10.0;
  }
}
BENCHMARK(BM_QuantileV)->Arg(0)->Arg(1);

static void BM_SupMeasure(benchmark::State& state) {
  const WindowSampler window(EpochLaw(0.6), state.range(0));
  Rng rng(4);
  for (auto _ : state) {
    const auto s = SupMeasureSample::draw(window, 2, 64, rng);
    benchmark::DoNotOptimize(s.evaluate(Interval::closed(0.2, 0.7)));
  }
}
BENCHMARK(BM_SupMeasure)->Arg(1024)->Arg(4096);

static void BM_ProcessPath(benchmark::State& state) {
  const ProcessSetup setup(TailModel::log_normal(2.0), MemoryParams(2, 0.6), state.range(0));
  Rng rng(5);
  for (auto _ : state) {
    const ProcessPath p = sample_process(setup, rng);
    benchmark::DoNotOptimize(empirical_M(p, Interval::closed(0.0, 1.0)));
  }
}
BENCHMARK(BM_ProcessPath)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
