#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cellfree/ddpg.hpp"
#include "cellfree/env.hpp"

namespace cellfree {

/// Round-synchronous row collection: one row per agent per round, assembly
/// only after every agent reported (a full barrier).
class Coordinator {
 public:
  explicit Coordinator(int num_agents);

  int num_agents() const { return num_agents_; }
  int round() const { return round_; }
  int rows_received() const;

  /// Registers agent_id's best row for the current round. Throws
  /// ProtocolError on a duplicate submission or a round mismatch.
  void submit_row(int round, int agent_id, const std::vector<double>& row);

  bool round_complete() const;

  /// Stacks the collected rows in agent order into W_new and opens the next
  /// round. Returns nothing while any agent is missing (the barrier holds).
  std::optional<Mat> try_assemble();

 private:
  int num_agents_;
  int round_ = 0;
  std::vector<std::optional<std::vector<double>>> pending_;
};

struct DistHyper {
  DdpgHyper agent;  // per-agent DDPG settings; the action is one row of W
  int rounds = 6;
  bool deterministic = true;  // serial agent schedule; threads otherwise
  Mat warm_start;             // initial broadcast W; empty -> uniform random
  std::uint64_t seed = 1;
};

/// Per-eAP learner state. W_local mirrors the last broadcast; only row m is
/// ever replaced by the agent's own actions.
struct AgentView {
  int m = 0;
  Mat W_local;
  BestTracker best;
  DdpgCore core;
  ReplayBuffer replay;
  Rng noise_rng;
  Rng sample_rng;
  UplinkEnv env;
  EpisodeRunner runner;
  std::vector<CurvePoint> curve;

  AgentView(int m_, const Scenario& scenario, const UplinkEnv::Options& opts,
            const DistHyper& hyper);
};

/// One DDPG episode over the row subproblem: the environment evaluates
/// W_local with row m swapped for the agent's action; the episode's best
/// (action, reward) lands in agent.best.
void local_episode(AgentView& agent);

struct DistRoundPoint {
  int round = 0;
  double assembled_reward = 0.0;             // reward of W_new on the shared block
  std::vector<double> agent_best_rewards;    // per-agent episode bests
};

struct DistResult {
  Mat W;
  std::vector<DistRoundPoint> curve;
  std::vector<std::vector<CurvePoint>> agent_curves;  // per-step, per agent
};

/// Alternates concurrent local episodes with coordinator rounds for
/// hyper.rounds rounds (Algorithm-style synchronous loop).
DistResult dist_train(const Scenario& scenario, const DistHyper& hyper,
                      const UplinkEnv::Options& env_opts = {});

/// Line-delimited JSON row exchange over loopback TCP, for running the
/// coordinator and scripted agents in separate processes. Message schema:
///   agent -> coordinator: {"round": r, "agent_id": m, "row": [K floats]}
///   coordinator -> agent: {"round": r, "W": [[K floats] x M]}
namespace socket_transport {

/// Serves num_agents clients for num_rounds rounds; returns the last W.
/// Blocks until the protocol completes.
Mat serve_coordinator(int port, int num_agents, int num_rounds);

/// Connects, submits the given row each round, returns the final broadcast.
Mat run_scripted_agent(int port, int agent_id, int num_rounds, const std::vector<double>& row);

}  // namespace socket_transport

}  // namespace cellfree
