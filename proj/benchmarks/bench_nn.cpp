#include <benchmark/benchmark.h>

#include "cellfree/nn.hpp"

using namespace cellfree;

namespace {

Mlp policy_net(int K, int out) {
  MlpConfig cfg;
  cfg.sizes = {K, 256, 128, out};
  cfg.out_act = OutputActivation::kFlatSoftmax;
  Rng rng(1);
  return Mlp::create(cfg, rng);
}

}  // namespace

static void PolicyInference(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const int K = std::max(1, M / 3);
  const Mlp net = policy_net(K, M * K);
  std::vector<double> x(K, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward1(x));
  }
  state.SetComplexityN(M);
}
BENCHMARK(PolicyInference)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void BatchedForwardBackward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  Mlp net = policy_net(5, 75);
  Mat X(batch, 5, 0.5);
  Mat dY(batch, 75, 1e-3);
  for (auto _ : state) {
    Mlp::Cache cache;
    net.forward(X, &cache);
    benchmark::DoNotOptimize(net.backward(cache, dY));
  }
}
BENCHMARK(BatchedForwardBackward)->Arg(16)->Arg(64)->Arg(256);

static void AdamStep(benchmark::State& state) {
  Mlp net = policy_net(5, 75);
  AdamState opt = AdamState::create(net, 1e-3);
  Mlp::Grads grads;
  for (int l = 0; l < net.num_layers(); ++l) {
    grads.dW.emplace_back(net.W[l].rows, net.W[l].cols, 1e-4);
    grads.db.emplace_back(net.b[l].size(), 1e-4);
  }
  for (auto _ : state) {
    adam_step(net, grads, opt);
  }
}
BENCHMARK(AdamStep);
