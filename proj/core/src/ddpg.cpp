#include "cellfree/ddpg.hpp"

#include <algorithm>
#include <cmath>

#include "cellfree/errors.hpp"

namespace cellfree {

namespace {
constexpr std::uint64_t kInitStream = 0x696e6974ULL;    // "init"
constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;   // "nois"
constexpr std::uint64_t kSampleStream = 0x73616d70ULL;  // "samp"
}  // namespace

DdpgCore DdpgCore::create(int state_dim, int action_rows, int action_cols,
                          const DdpgHyper& hyper, Rng& init_rng) {
  const int action_dim = action_rows * action_cols;

  MlpConfig actor_cfg;
  actor_cfg.sizes.push_back(state_dim);
  for (int h : hyper.hidden) actor_cfg.sizes.push_back(h);
  actor_cfg.sizes.push_back(action_dim);
  actor_cfg.out_act = hyper.action_act;
  actor_cfg.final_init_bound = 3e-3;
  if (hyper.action_act == OutputActivation::kColumnSoftmax) {
    actor_cfg.softmax_rows = action_rows;
    actor_cfg.softmax_cols = action_cols;
  }

  MlpConfig critic_cfg;
  critic_cfg.sizes.push_back(state_dim + action_dim);
  for (int h : hyper.hidden) critic_cfg.sizes.push_back(h);
  critic_cfg.sizes.push_back(1);
  critic_cfg.out_act = OutputActivation::kLinear;
  critic_cfg.final_init_bound = 3e-3;

  DdpgCore core;
  core.actor = Mlp::create(actor_cfg, init_rng);
  core.critic = Mlp::create(critic_cfg, init_rng);
  if (!hyper.actor_bias_init.empty()) {
    if (hyper.actor_bias_init.size() != static_cast<size_t>(action_dim)) {
      throw DimensionError("actor_bias_init length != action dim");
    }
    core.actor.b.back() = hyper.actor_bias_init;
  }
  core.actor_target = core.actor;
  core.critic_target = core.critic;
  core.opt_actor = AdamState::create(core.actor, hyper.lr_actor);
  core.opt_actor.plain_sgd = hyper.actor_plain_sgd;
  core.opt_critic = AdamState::create(core.critic, hyper.lr_critic);
  return core;
}

std::vector<double> anchor_bias(const std::vector<int>& sic_order, int M, OutputActivation act,
                                double decay, double level) {
  const int K = static_cast<int>(sic_order.size());
  std::vector<int> pos(K);
  for (int i = 0; i < K; ++i) pos[sic_order[i]] = i;

  std::vector<double> bias(static_cast<size_t>(M) * K, 0.0);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const double scale = level * std::pow(decay, pos[k]);
      double b = 0.0;
      switch (act) {
        case OutputActivation::kFlatSoftmax:
        case OutputActivation::kColumnSoftmax:
          b = pos[k] * std::log(decay);  // softmax turns log-scales into scales
          break;
        case OutputActivation::kSigmoid:
          b = std::log(scale / (1.0 - scale));
          break;
        case OutputActivation::kLinear:
          b = scale;
          break;
      }
      bias[static_cast<size_t>(m) * K + k] = b;
    }
  }
  return bias;
}

std::vector<double> policy_bias_for(const Mat& W, OutputActivation act) {
  std::vector<double> bias(W.size(), 0.0);
  constexpr double kFloor = 1e-4;
  for (size_t i = 0; i < W.size(); ++i) {
    const double w = std::clamp(W.a[i], kFloor, 1.0 - kFloor);
    switch (act) {
      case OutputActivation::kFlatSoftmax:
      case OutputActivation::kColumnSoftmax:
        bias[i] = std::log(w);
        break;
      case OutputActivation::kSigmoid:
        bias[i] = std::log(w / (1.0 - w));
        break;
      case OutputActivation::kLinear:
        bias[i] = w;
        break;
    }
  }
  return bias;
}

std::vector<double> state_features(const std::vector<double>& gamma, StateFeatures mode,
                                   double scale) {
  std::vector<double> f(gamma.size());
  for (size_t i = 0; i < gamma.size(); ++i) {
    f[i] = (mode == StateFeatures::kLinearSinr ? gamma[i] : std::log2(1.0 + gamma[i])) * scale;
  }
  return f;
}

std::vector<double> explore_action(const Mlp& actor, const std::vector<double>& s, double sigma,
                                    Rng& rng) {
  std::vector<double> a = actor.forward1(s);
  if (sigma > 0.0) {
    for (double& v : a) v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
  }
  return a;
}

Batch gather_batch(const ReplayBuffer& buffer, const std::vector<size_t>& idx) {
  if (idx.empty()) throw ContractError("update on an empty batch");
  const int n = static_cast<int>(idx.size());
  const Experience& first = buffer[idx[0]];
  Batch b;
  b.S = Mat(n, static_cast<int>(first.s.size()));
  b.A = Mat(n, static_cast<int>(first.a.size()));
  b.S_next = Mat(n, static_cast<int>(first.s_next.size()));
  b.r.resize(n);
  for (int i = 0; i < n; ++i) {
    const Experience& e = buffer[idx[i]];
    std::copy(e.s.begin(), e.s.end(), b.S.row(i));
    std::copy(e.a.begin(), e.a.end(), b.A.row(i));
    std::copy(e.s_next.begin(), e.s_next.end(), b.S_next.row(i));
    b.r[i] = e.r;
  }
  return b;
}

namespace {

Mat hcat(const Mat& L, const Mat& R, double r_scale = 1.0) {
  Mat out(L.rows, L.cols + R.cols);
  for (int r = 0; r < L.rows; ++r) {
    std::copy(L.row(r), L.row(r) + L.cols, out.row(r));
    for (int c = 0; c < R.cols; ++c) out(r, L.cols + c) = R(r, c) * r_scale;
  }
  return out;
}

}  // namespace

double critic_update(DdpgCore& core, const Batch& batch, double zeta, double action_scale) {
  const int n = batch.S.rows;

  const Mat a_next = core.actor_target.forward(batch.S_next);
  const Mat q_next = core.critic_target.forward(hcat(batch.S_next, a_next, action_scale));

  Mlp::Cache cache;
  const Mat q = core.critic.forward(hcat(batch.S, batch.A, action_scale), &cache);

  double loss = 0.0;
  Mat dq(n, 1);
  for (int i = 0; i < n; ++i) {
    const double y = batch.r[i] + zeta * q_next(i, 0);
    const double err = q(i, 0) - y;
    loss += err * err;
    dq(i, 0) = 2.0 * err / n;
  }
  loss /= n;

  const Mlp::Grads grads = core.critic.backward(cache, dq);
  adam_step(core.critic, grads, core.opt_critic);
  return loss;
}

double actor_update(DdpgCore& core, const Batch& batch, double action_scale) {
  const int n = batch.S.rows;
  const int sdim = batch.S.cols;
  const int adim = core.actor.output_size();

  Mlp::Cache actor_cache;
  const Mat a_mu = core.actor.forward(batch.S, &actor_cache);

  Mlp::Cache critic_cache;
  const Mat q = core.critic.forward(hcat(batch.S, a_mu, action_scale), &critic_cache);

  double mean_q = 0.0;
  Mat dq(n, 1);
  for (int i = 0; i < n; ++i) {
    mean_q += q(i, 0);
    dq(i, 0) = 1.0 / n;
  }
  mean_q /= n;

  // dQ/da, read off the critic's input gradient.
  const Mlp::Grads critic_grads = core.critic.backward(critic_cache, dq);
  Mat da(n, adim);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < adim; ++c) {
      da(i, c) = critic_grads.dX(i, sdim + c) * action_scale;  // chain d(a*c)/da
    }
  }

  const Mlp::Grads actor_grads = core.actor.backward(actor_cache, da);
  adam_step(core.actor, actor_grads, core.opt_actor, /*maximize=*/true);
  return mean_q;
}

double EpisodeRunner::sigma_at(long step) const {
  if (total_steps <= 1) return hyper->noise_sigma;
  const double t = std::min(1.0, static_cast<double>(step) / (total_steps - 1));
  return hyper->noise_sigma + t * (hyper->noise_sigma_final - hyper->noise_sigma);
}

void EpisodeRunner::run_episode(const EnvAdapter& env, std::vector<CurvePoint>& curve,
                                BestTracker* best) {
  std::vector<double> s = state_features(env.reset(), hyper->features, hyper->scaling.state);
  for (int t = 0; t < hyper->steps_per_episode; ++t) {
    double sigma = sigma_at(global_step);
    if (hyper->noise_mix_prob > 0.0) {
      // The wide-probe fraction anneals out with the schedule so the tail
      // of the run measures the policy itself.
      const double frac = total_steps > 1
                              ? 1.0 - static_cast<double>(global_step) / (total_steps - 1)
                              : 0.0;
      if (noise_rng->uniform() < hyper->noise_mix_prob * std::max(0.0, frac)) {
        sigma = hyper->noise_mix_sigma;
      }
    }
    const std::vector<double> a = explore_action(core->actor, s, sigma, *noise_rng);
    const UplinkEnv::StepResult res = env.step(a);
    const std::vector<double> s_next =
        state_features(res.state.gamma, hyper->features, hyper->scaling.state);

    replay->push({s, a, (res.reward - hyper->reward_baseline) * hyper->reward_scale, s_next});
    if (best != nullptr) best->observe(a, res.reward);

    CurvePoint pt;
    pt.step = global_step;
    pt.reward = res.reward;
    if (replay->size() >= static_cast<size_t>(hyper->batch)) {
      const Batch batch =
          gather_batch(*replay, replay->sample_indices(hyper->batch, *sample_rng));
      pt.critic_loss = critic_update(*core, batch, hyper->zeta, hyper->scaling.action);
      if (global_step >= hyper->actor_delay) {
        pt.actor_objective = actor_update(*core, batch, hyper->scaling.action);
        polyak_update(core->actor_target, core->actor, hyper->tau);
      }
      polyak_update(core->critic_target, core->critic, hyper->tau);
    }
    curve.push_back(pt);

    s = std::move(s_next);
    ++global_step;
  }
}

DdpgResult ddpg_train(UplinkEnv& env, const DdpgHyper& hyper) {
  const int M = env.M(), K = env.K();
  Rng init_rng = Rng::stream(hyper.seed, kInitStream);
  Rng noise_rng = Rng::stream(hyper.seed, kNoiseStream);
  Rng sample_rng = Rng::stream(hyper.seed, kSampleStream);

  DdpgResult out;
  out.core = DdpgCore::create(K, M, K, hyper, init_rng);
  ReplayBuffer replay(hyper.replay_capacity);

  EnvAdapter adapter;
  adapter.reset = [&env]() { return env.reset().gamma; };
  adapter.step = [&env, M, K](const std::vector<double>& a) {
    Mat W(M, K);
    W.a = a;
    return env.step(W);
  };

  EpisodeRunner runner;
  runner.core = &out.core;
  runner.replay = &replay;
  runner.hyper = &hyper;
  runner.noise_rng = &noise_rng;
  runner.sample_rng = &sample_rng;
  runner.total_steps = static_cast<long>(hyper.episodes) * hyper.steps_per_episode;

  for (int ep = 0; ep < hyper.episodes; ++ep) {
    runner.run_episode(adapter, out.curve, nullptr);
  }
  return out;
}

}  // namespace cellfree
