#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cellfree/env.hpp"
#include "cellfree/nn.hpp"
#include "cellfree/replay.hpp"
#include "cellfree/rng.hpp"

namespace cellfree {

/// How SINRs are presented to the networks. The environment state is the
/// linear SINR vector; per-UE rates log2(1+gamma) condition the inputs to
/// a few tens instead of ~1e7 and carry the same information.
enum class StateFeatures { kLinearSinr, kLogRate };

/// Input conditioning: per-UE rates are O(30) and softmax action entries
/// O(1/(M*K)); both are brought to O(1) before entering the networks.
struct FeatureScaling {
  double state = 0.1;   // multiplies the state features
  double action = 1.0;  // multiplies the action inside the critic input
};

struct DdpgHyper {
  double zeta = 0.99;
  double lr_actor = 1e-3;
  double lr_critic = 1e-3;
  bool actor_plain_sgd = false;
  double tau = 0.005;
  int batch = 64;
  double noise_sigma = 0.1;
  double noise_sigma_final = 0.01;  // linear decay target over the run
  // Occasional wide-noise probes. The informative samples live in a tiny
  // ball around the policy; without visibly bad samples beyond it the
  // critic extrapolates optimistically and the actor chases the artifact.
  double noise_mix_sigma = 0.0;
  double noise_mix_prob = 0.0;
  int episodes = 10;
  int steps_per_episode = 1000;
  // Steps before policy updates start; the critic trains from the first
  // full batch either way. Keeps the policy on its warm start until the
  // value surface carries signal.
  int actor_delay = 0;
  std::size_t replay_capacity = 1'000'000;
  std::vector<int> hidden = {256, 128};
  OutputActivation action_act = OutputActivation::kColumnSoftmax;
  StateFeatures features = StateFeatures::kLogRate;
  FeatureScaling scaling;
  double reward_scale = 1.0;     // applied to rewards entering the learner
  double reward_baseline = 0.0;  // subtracted first; kills the bootstrap offset
  // Optional output-layer bias (length = action dim). Seeds the initial
  // policy at a chosen point, e.g. the decode-order anchor; successful-SIC
  // margins are unreachable by blind exploration.
  std::vector<double> actor_bias_init;
  std::uint64_t seed = 1;
};

/// Actor/critic pair with their Polyak-averaged targets and optimizers.
struct DdpgCore {
  Mlp actor, critic;
  Mlp actor_target, critic_target;
  AdamState opt_actor, opt_critic;

  static DdpgCore create(int state_dim, int action_rows, int action_cols,
                         const DdpgHyper& hyper, Rng& init_rng);
};

std::vector<double> state_features(const std::vector<double>& gamma, StateFeatures mode,
                                   double scale = 1.0);

/// Output-layer bias that makes a fresh actor emit the decode-order anchor
/// (flat eAP directions, column scales decaying along the SIC order).
std::vector<double> anchor_bias(const std::vector<int>& sic_order, int M, OutputActivation act,
                                double decay = 0.55, double level = 0.5);

/// Output-layer bias that makes a fresh actor emit (a normalization of) the
/// given beamforming matrix. Column softmax cannot carry the cross-column
/// scales, so it only receives the directions.
std::vector<double> policy_bias_for(const Mat& W, OutputActivation act);

/// a = clamp_[0,1](mu(s) + N(0, sigma)).
std::vector<double> explore_action(const Mlp& actor, const std::vector<double>& s, double sigma,
                                   Rng& rng);

struct Batch {
  Mat S, A, S_next;
  std::vector<double> r;
};

Batch gather_batch(const ReplayBuffer& buffer, const std::vector<size_t>& idx);

/// One critic regression step against y = r + zeta * Q'(s', mu'(s')).
/// Returns the mean-squared loss before the update.
double critic_update(DdpgCore& core, const Batch& batch, double zeta,
                     double action_scale = 1.0);

/// One deterministic-policy-gradient ascent step on the actor; the critic's
/// action-input gradient is chained through the actor. Returns the mean Q.
double actor_update(DdpgCore& core, const Batch& batch, double action_scale = 1.0);

struct CurvePoint {
  long step = 0;
  double reward = 0.0;       // raw environment reward
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

/// A minimal environment facade for the training loop, so the centralized
/// trainer and the per-eAP agents share one code path (and one RNG
/// consumption order).
struct EnvAdapter {
  std::function<std::vector<double>()> reset;
  std::function<UplinkEnv::StepResult(const std::vector<double>&)> step;  // flat action
};

/// Per-episode best-action tracking for the distributed scheme: seeded by
/// the first step, then strictly-greater-than updates.
struct BestTracker {
  std::vector<double> action;
  double reward = 0.0;
  bool seeded = false;

  void observe(const std::vector<double>& a, double r) {
    if (!seeded || r > reward) {
      action = a;
      reward = r;
      seeded = true;
    }
  }
};

struct EpisodeRunner {
  DdpgCore* core = nullptr;
  ReplayBuffer* replay = nullptr;
  const DdpgHyper* hyper = nullptr;
  Rng* noise_rng = nullptr;
  Rng* sample_rng = nullptr;
  long global_step = 0;
  long total_steps = 0;  // for the noise schedule

  double sigma_at(long step) const;

  /// Runs one episode of Algorithm-style exploration + updates; appends one
  /// curve point per step. Optionally tracks the episode's best action.
  void run_episode(const EnvAdapter& env, std::vector<CurvePoint>& curve, BestTracker* best);
};

struct DdpgResult {
  DdpgCore core;
  std::vector<CurvePoint> curve;
};

/// Centralized trainer (the full beamforming matrix is the action).
DdpgResult ddpg_train(UplinkEnv& env, const DdpgHyper& hyper);

}  // namespace cellfree
