#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cellfree/env.hpp"
#include "cellfree/nn.hpp"
#include "cellfree/scenario.hpp"

namespace cellfree {

/// One experiment: a scenario preset, a set of algorithms, a set of seeds.
struct ExperimentConfig {
  std::string preset = "small";  // small | medium | large | custom
  ScenarioConfig scenario;       // used directly when preset == "custom"
  std::vector<std::string> algos = {"conjugate", "mmse", "ddpg", "d4pg", "dist"};
  std::vector<std::uint64_t> seeds = {1};

  int episodes = 10;
  int steps_per_episode = 1000;
  int batch = 64;
  // Exploration scale is matched to the action entries (see the DRL notes
  // in the README); box-activation outputs live well below 1.
  double noise_sigma = 4e-4;
  double noise_sigma_final = 1e-4;
  double noise_mix_sigma = 0.01;  // annealed wide probes
  double noise_mix_prob = 0.15;
  double lr_actor = 3e-4;
  double lr_critic = 1e-3;
  int actor_delay = 2000;
  std::vector<int> hidden = {256, 128};
  std::vector<int> dist_hidden = {96, 48};
  OutputActivation action_act = OutputActivation::kSigmoid;
  CsiMode csi = CsiMode::kFixedBlock;
  double lambda_penalty = 1.0;
  bool deterministic = true;

  // D4PG knobs
  int actors = 0;  // 0 -> M
  int nstep = 5;
  int atoms = 51;
  double v_min = -20.0;
  double v_max = 100.0;
  int t_target = 100;
  int t_actors = 100;

  // grad-ascent knobs
  double ga_lr = 0.1;
  int ga_iters = 100;

  std::string out_dir = "out";

  ScenarioConfig scenario_for_seed(std::uint64_t seed) const;
  std::string canonical_string() const;  // hashed into the manifest
};

struct AlgoSeedOutcome {
  std::uint64_t seed = 0;
  double final_reward = 0.0;  // env-reward scale (bits/s/Hz, or the penalty)
  double rate = 0.0;          // raw sum-rate of the final beamformer
  double normalized = 0.0;    // final_reward / same-block MMSE sum-rate
  double mmse_rate = 0.0;
  std::string curve_path;
};

struct ExperimentOutcome {
  std::map<std::string, std::vector<AlgoSeedOutcome>> per_algo;
  std::string summary_path;
  std::string manifest_path;
};

/// Runs every (algo, seed) pair, writing per-run learning-curve CSVs, an
/// aggregated summary.json, and a manifest.json carrying the full config
/// plus its hash. Returns the in-memory outcomes as well.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

enum class FlopsScheme { kCentralized, kDistributedExperience, kDistributedLearning };

struct FlopsReport {
  long long drl_flops = 0;       // policy feed-forward
  long long mmse_order = 0;      // (M*K)^2, reported as an order only
  std::string formula;
};

/// Inference FLOP count for a policy with the given hidden sizes:
///   2 * (H1*K + HL*out + sum_i H_{i-1}*H_i),
/// out = M*K for the centralized/distributed-experience schemes and K for
/// distributed learning. Fully-connected layers cost 2*I*O.
FlopsReport flops_report(int M, int K, const std::vector<int>& hidden, FlopsScheme scheme);

struct TimingRow {
  int M = 0;
  int K = 0;
  double t_inference_s = 0.0;
  double t_gradascent_s = 0.0;
};

struct TimingOptions {
  int m_begin = 15;
  int m_end = 150;
  int m_step = 15;
  int inference_reps = 100;
  int ga_iters = 5;
  std::vector<int> hidden = {256, 128};
};

/// Policy feed-forward latency and a gradient-ascent run time across the
/// M sweep (K = M/3). Inference timing is weight-agnostic.
std::vector<TimingRow> timing_report(const TimingOptions& opt);

void write_timing_csv(const std::vector<TimingRow>& rows, const std::string& path);

/// FNV-1a hash of a canonical config string.
std::uint64_t config_hash(const std::string& canonical);

}  // namespace cellfree
