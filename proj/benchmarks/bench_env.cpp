#include <benchmark/benchmark.h>

#include "cellfree/baselines.hpp"
#include "cellfree/env.hpp"

using namespace cellfree;

namespace {

UplinkEnv make_env(int M, int K) {
  ScenarioConfig c = scenario_preset("small");
  c.M = M;
  c.K = K;
  c.seed = 1;
  return UplinkEnv(generate_scenario(c));
}

}  // namespace

static void EnvStep(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const int K = std::max(1, M / 3);
  UplinkEnv env = make_env(M, K);
  env.reset();
  Mat W(M, K, 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.step(W));
  }
  state.SetComplexityN(M);
}
BENCHMARK(EnvStep)->RangeMultiplier(2)->Range(8, 64)->Complexity();

static void BlockSampling(benchmark::State& state) {
  ScenarioConfig c = scenario_preset("small");
  c.seed = 3;
  UplinkEnv::Options opts;
  opts.csi = CsiMode::kPerEpisode;
  UplinkEnv env(generate_scenario(c), opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.reset());
  }
}
BENCHMARK(BlockSampling);

static void WarmStartSearch(benchmark::State& state) {
  UplinkEnv env = make_env(15, 5);
  const LinkPowers lp_est = env.estimated_link_powers();
  const double sens = env.scenario().config.sic_sensitivity_linear();
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_based_warm_start(lp_est, sens, 3e-4));
  }
}
BENCHMARK(WarmStartSearch);
