#include <doctest.h>

#include <cmath>

#include "cellfree/d4pg.hpp"

using namespace cellfree;

namespace {

EnvFactory tiny_env_factory(int M, int K, std::uint64_t seed) {
  ScenarioConfig c = scenario_preset("small");
  c.M = M;
  c.K = K;
  c.seed = seed;
  const Scenario scen = generate_scenario(c);
  return [scen](int) { return UplinkEnv(scen); };
}

D4pgHyper tiny_hyper() {
  D4pgHyper h;
  h.hidden = {16, 8};
  h.batch = 8;
  h.nstep = 3;
  h.num_actors = 2;
  h.learner_steps = 20;
  h.steps_per_episode = 10;
  h.t_target = 4;
  h.t_actors = 4;
  h.action_act = OutputActivation::kSigmoid;
  h.replay_capacity = 4096;
  return h;
}

}  // namespace

TEST_CASE("n-step assembler emits sliding windows and flushes on resets") {
  NStepAssembler asm3(3);
  auto exp_at = [](double t) { return Experience{{t}, {t}, t, {t + 1}}; };

  CHECK_FALSE(asm3.add(exp_at(0), true).has_value());
  CHECK_FALSE(asm3.add(exp_at(1), false).has_value());
  const auto t2 = asm3.add(exp_at(2), false);
  REQUIRE(t2.has_value());
  CHECK(t2->r == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(t2->s_terminal == std::vector<double>{3.0});

  const auto t3 = asm3.add(exp_at(3), false);
  REQUIRE(t3.has_value());
  CHECK(t3->r == std::vector<double>{1.0, 2.0, 3.0});

  // an episode start flushes the window
  CHECK_FALSE(asm3.add(exp_at(9), true).has_value());
  CHECK_FALSE(asm3.add(exp_at(10), false).has_value());
  const auto t4 = asm3.add(exp_at(11), false);
  REQUIRE(t4.has_value());
  CHECK(t4->r == std::vector<double>{9.0, 10.0, 11.0});
}

TEST_CASE("two workers for 100 steps feed exactly 200 experiences") {
  D4pgHyper h = tiny_hyper();
  h.num_actors = 2;
  h.learner_steps = 100;
  const D4pgResult r = d4pg_train(tiny_env_factory(3, 2, 5), h);
  REQUIRE_FALSE(r.curve.empty());
  // the last curve row carries the cumulative actor-step count; the warmup
  // rounds before the first learner step also count
  CHECK(r.curve.back().actor_steps >= 200);
  CHECK(r.curve.back().actor_steps % 2 == 0);  // drained in whole rounds
  CHECK(r.curve.back().learner_step == 100);
}

TEST_CASE("nstep_target equals the explicit projection") {
  D4pgHyper h = tiny_hyper();
  Rng init(3);
  MlpConfig acfg;
  acfg.sizes = {2, 4, 6};
  acfg.out_act = OutputActivation::kSigmoid;
  const Mlp actor = Mlp::create(acfg, init);
  MlpConfig ccfg;
  ccfg.sizes = {8, 4, h.support.num_atoms};
  ccfg.out_act = OutputActivation::kFlatSoftmax;
  const Mlp critic = Mlp::create(ccfg, init);

  Trajectory traj;
  traj.s = {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}};
  traj.a = {{0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}};
  traj.r = {1.0, 2.0, 3.0};
  traj.s_terminal = {0.7, 0.8};

  const ValueDistribution got = nstep_target(traj, 0.9, actor, critic, h.support);

  std::vector<double> sa = traj.s_terminal;
  const std::vector<double> a = actor.forward1(traj.s_terminal);
  sa.insert(sa.end(), a.begin(), a.end());
  const ValueDistribution boot = critic.forward1(sa);
  const ValueDistribution want = project_nstep(traj.r, 0.9, boot, h.support);
  CHECK(got == want);
}

TEST_CASE("degenerate configuration runs to completion") {
  D4pgHyper h = tiny_hyper();
  h.num_actors = 1;
  h.nstep = 1;
  h.t_target = 1;
  h.learner_steps = 30;
  const D4pgResult r = d4pg_train(tiny_env_factory(3, 2, 7), h);
  CHECK(r.curve.size() == 30);
  for (const D4pgCurvePoint& p : r.curve) {
    CHECK(std::isfinite(p.reward));
    CHECK(std::isfinite(p.critic_loss));
  }
}

TEST_CASE("deterministic mode reproduces the learning curve") {
  D4pgHyper h = tiny_hyper();
  const D4pgResult a = d4pg_train(tiny_env_factory(3, 2, 9), h);
  const D4pgResult b = d4pg_train(tiny_env_factory(3, 2, 9), h);
  REQUIRE(a.curve.size() == b.curve.size());
  for (size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].reward == b.curve[i].reward);
    CHECK(a.curve[i].critic_loss == b.curve[i].critic_loss);
    CHECK(a.curve[i].actor_steps == b.curve[i].actor_steps);
  }
  CHECK(a.actor.flatten_params() == b.actor.flatten_params());
}

TEST_CASE("free-running mode completes and keeps valid distributions") {
  D4pgHyper h = tiny_hyper();
  h.deterministic = false;
  h.learner_steps = 25;
  const D4pgResult r = d4pg_train(tiny_env_factory(3, 2, 11), h);
  CHECK(r.curve.size() == 25);
}

TEST_CASE("targets are bit-identical right after a hard-copy step") {
  D4pgHyper h = tiny_hyper();
  h.t_target = 10;
  h.learner_steps = 10;  // ends exactly on a copy event
  const D4pgResult r = d4pg_train(tiny_env_factory(3, 2, 13), h);
  CHECK(r.actor_target.flatten_params() == r.actor.flatten_params());
  CHECK(r.critic_target.flatten_params() == r.critic.flatten_params());

  h.learner_steps = 9;  // one step short of the copy
  const D4pgResult r2 = d4pg_train(tiny_env_factory(3, 2, 13), h);
  CHECK(r2.actor_target.flatten_params() != r2.actor.flatten_params());
}

TEST_CASE("critic outputs remain distributions during training") {
  D4pgHyper h = tiny_hyper();
  h.learner_steps = 15;
  const D4pgResult r = d4pg_train(tiny_env_factory(3, 2, 15), h);
  // evaluate the critic on a fresh input: probabilities sum to one
  std::vector<double> x(r.critic.input_size(), 0.2);
  const std::vector<double> q = r.critic.forward1(x);
  double total = 0.0;
  for (double p : q) {
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
}
