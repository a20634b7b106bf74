#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cellfree/estimation.hpp"
#include "cellfree/fading.hpp"
#include "cellfree/pilot.hpp"
#include "cellfree/scenario.hpp"
#include "cellfree/sinr.hpp"

namespace cellfree {

/// How channel realizations relate to training episodes.
enum class CsiMode {
  kFixedBlock,  // one realization for the whole run
  kPerEpisode,  // a fresh realization at every reset
};

/// Everything sampled for one coherence block.
struct ChannelState {
  std::uint64_t block_id = 0;
  FadingBlock fading;
  EstimationResult est;
  LinkPowers lp;
};

struct EnvState {
  std::vector<double> gamma;  // per-UE SINR, linear
  std::uint64_t block_id = 0;
};

/// Uplink beamforming environment: states are per-UE SINRs, actions are
/// beamforming matrices, the reward is the sum-rate when every SIC
/// condition holds and a fixed penalty otherwise.
class UplinkEnv {
 public:
  struct Options {
    double lambda_penalty = 1.0;
    CsiMode csi = CsiMode::kFixedBlock;
  };

  struct StepResult {
    EnvState state;
    double reward = 0.0;
    bool feasible = false;
    double rate = 0.0;  // sum-rate regardless of feasibility
  };

  explicit UplinkEnv(Scenario scenario) : UplinkEnv(std::move(scenario), Options{}) {}
  UplinkEnv(Scenario scenario, Options options);

  int M() const { return scenario_.config.M; }
  int K() const { return scenario_.config.K; }
  const Scenario& scenario() const { return scenario_; }
  const PilotPlan& pilots() const { return pilots_; }
  const Options& options() const { return options_; }
  const ChannelState& channel() const { return channel_; }

  /// Samples the block for the next episode (or reuses the fixed one) and
  /// returns the SINR observed under an all-ones beamforming matrix.
  EnvState reset();

  /// Evaluates one action. Throws ContractError if any entry leaves [0, 1].
  StepResult step(const Mat& W);

  /// Reward of W on the current block without advancing the trace.
  double reward_of(const Mat& W) const;
  bool feasible_of(const Mat& W) const;
  std::vector<double> gamma_of(const Mat& W) const;

  /// Link powers rebuilt from the estimated gains: what the receiver can
  /// legitimately act on when forming combiners.
  LinkPowers estimated_link_powers() const;

  /// Optional per-step CSV trace: step, reward, gamma_1..gamma_K, feasible.
  void set_trace(std::ostream* trace);

 private:
  void sample_block_(std::uint64_t block_id);

  Scenario scenario_;
  PilotPlan pilots_;
  SicConfig sic_;
  Options options_;
  ChannelState channel_;
  std::uint64_t episodes_started_ = 0;
  std::uint64_t step_index_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace cellfree
