#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "cellfree/ddpg.hpp"
#include "cellfree/distributional.hpp"
#include "cellfree/env.hpp"
#include "cellfree/nn.hpp"
#include "cellfree/per.hpp"

namespace cellfree {

struct D4pgHyper {
  double zeta = 0.99;
  double lr_actor = 1e-3;   // alpha_0; decays linearly to zero when scheduled
  double lr_critic = 1e-3;  // beta_0
  bool actor_plain_sgd = false;
  bool lr_schedule = true;  // Algorithm-style alpha_t: linear decay to 0
  int batch = 64;   // P
  int nstep = 5;    // N
  DistributionSupport support;  // 51 atoms on [-20, 100]
  int t_target = 100;
  int t_actors = 100;
  int num_actors = 0;  // 0 -> one per eAP
  long learner_steps = 6000;
  int steps_per_episode = 1000;
  int actor_delay = 0;  // learner steps before policy updates start
  double noise_sigma = 0.1;
  double noise_sigma_final = 0.01;
  double noise_mix_sigma = 0.0;  // see DdpgHyper
  double noise_mix_prob = 0.0;
  std::size_t replay_capacity = 1'000'000;
  double priority_floor = 1e-3;
  std::vector<int> hidden = {256, 128};
  OutputActivation action_act = OutputActivation::kColumnSoftmax;
  StateFeatures features = StateFeatures::kLogRate;
  FeatureScaling scaling;
  double reward_scale = 1.0;
  double reward_baseline = 0.0;
  std::vector<double> actor_bias_init;  // see DdpgHyper
  bool deterministic = true;  // serialized sink; threads otherwise
  std::uint64_t seed = 1;
};

/// Builds sliding N-step windows out of one actor's experience stream.
/// Episode starts flush the window so trajectories never straddle resets.
class NStepAssembler {
 public:
  explicit NStepAssembler(int n) : n_(n) {}

  std::optional<Trajectory> add(const Experience& e, bool episode_start);

 private:
  int n_;
  std::deque<Experience> window_;
};

/// Distributional critic target: Y = sum_n zeta^n r_n + zeta^N Z'(s_N, mu'(s_N)),
/// projected onto the support.
ValueDistribution nstep_target(const Trajectory& traj, double zeta, const Mlp& actor_target,
                               const Mlp& critic_target, const DistributionSupport& support,
                               double action_scale = 1.0);

struct D4pgCurvePoint {
  long learner_step = 0;
  long actor_steps = 0;  // total environment steps across all actors
  double reward = 0.0;   // mean raw env reward drained this learner step
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

struct D4pgResult {
  Mlp actor;
  Mlp critic;
  Mlp actor_target;
  Mlp critic_target;
  std::vector<D4pgCurvePoint> curve;
};

using EnvFactory = std::function<UplinkEnv(int /*actor_id*/)>;

/// D4PG learner with num_actors exploration workers feeding one prioritized
/// replay. In deterministic mode the workers are stepped round-robin by the
/// learner thread (reproducible curves); otherwise each worker runs on its
/// own thread and the sink drains their queues round-robin.
D4pgResult d4pg_train(const EnvFactory& env_factory, const D4pgHyper& hyper);

}  // namespace cellfree
