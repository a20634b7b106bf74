#include "cellfree/d4pg.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "cellfree/errors.hpp"

namespace cellfree {

namespace {
constexpr std::uint64_t kInitStream = 0x64347067ULL;       // "d4pg"
constexpr std::uint64_t kSampleStream = 0x70657273ULL;     // "pers"
constexpr std::uint64_t kWorkerNoiseBase = 0x776f726bULL;  // "work"
constexpr double kProbClamp = 1e-12;
}  // namespace

std::optional<Trajectory> NStepAssembler::add(const Experience& e, bool episode_start) {
  if (episode_start) window_.clear();
  window_.push_back(e);
  if (static_cast<int>(window_.size()) < n_) return std::nullopt;

  Trajectory t;
  t.s.reserve(n_);
  t.a.reserve(n_);
  t.r.reserve(n_);
  for (const Experience& w : window_) {
    t.s.push_back(w.s);
    t.a.push_back(w.a);
    t.r.push_back(w.r);
  }
  t.s_terminal = window_.back().s_next;
  window_.pop_front();
  return t;
}

ValueDistribution nstep_target(const Trajectory& traj, double zeta, const Mlp& actor_target,
                               const Mlp& critic_target, const DistributionSupport& support,
                               double action_scale) {
  std::vector<double> sa = traj.s_terminal;
  const std::vector<double> a = actor_target.forward1(traj.s_terminal);
  for (double v : a) sa.push_back(v * action_scale);
  const ValueDistribution bootstrap = critic_target.forward1(sa);
  return project_nstep(traj.r, zeta, bootstrap, support);
}

namespace {

// One exploration actor: environment replica, noise stream, policy copy,
// and the learner-side N-step assembler for its stream.
struct Worker {
  int id = 0;
  UplinkEnv env;
  Rng noise;
  Mlp actor;
  NStepAssembler assembler;
  std::vector<double> s;
  int episode_step = 0;
  long steps = 0;

  Worker(int id_, UplinkEnv env_, Rng noise_, Mlp actor_, int nstep)
      : id(id_), env(std::move(env_)), noise(std::move(noise_)), actor(std::move(actor_)),
        assembler(nstep) {}
};

struct StepRecord {
  int worker_id = 0;
  Experience exp;
  bool episode_start = false;
  double raw_reward = 0.0;
};

StepRecord step_worker(Worker& w, const D4pgHyper& hyper, long schedule_total) {
  StepRecord rec;
  rec.worker_id = w.id;
  rec.episode_start = (w.episode_step == 0);
  if (rec.episode_start) {
    w.s = state_features(w.env.reset().gamma, hyper.features, hyper.scaling.state);
  }

  double sigma = hyper.noise_sigma;
  if (schedule_total > 1) {
    const double t = std::min(1.0, static_cast<double>(w.steps) / (schedule_total - 1));
    sigma += t * (hyper.noise_sigma_final - hyper.noise_sigma);
  }
  if (hyper.noise_mix_prob > 0.0) {
    const double frac =
        schedule_total > 1
            ? 1.0 - static_cast<double>(w.steps) / (schedule_total - 1)
            : 0.0;
    if (w.noise.uniform() < hyper.noise_mix_prob * std::max(0.0, frac)) {
      sigma = hyper.noise_mix_sigma;
    }
  }
  const std::vector<double> a = explore_action(w.actor, w.s, sigma, w.noise);

  Mat W(w.env.M(), w.env.K());
  W.a = a;
  const UplinkEnv::StepResult res = w.env.step(W);
  const std::vector<double> s_next =
      state_features(res.state.gamma, hyper.features, hyper.scaling.state);

  rec.exp = {w.s, a, (res.reward - hyper.reward_baseline) * hyper.reward_scale, s_next};
  rec.raw_reward = res.reward;

  w.s = s_next;
  w.episode_step = (w.episode_step + 1) % hyper.steps_per_episode;
  ++w.steps;
  return rec;
}

// Mutex-guarded per-worker experience queues; the learner drains them
// round-robin so faster workers cannot crowd out the rest.
class ExperienceSink {
 public:
  explicit ExperienceSink(int workers) : queues_(workers) {}

  void push(StepRecord rec) {
    std::lock_guard<std::mutex> lock(mu_);
    queues_[rec.worker_id].push_back(std::move(rec));
  }

  // One pass over the workers, popping at most one record from each.
  std::vector<StepRecord> drain_round() {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<StepRecord> out;
    for (auto& q : queues_) {
      if (!q.empty()) {
        out.push_back(std::move(q.front()));
        q.pop_front();
      }
    }
    return out;
  }

 private:
  std::mutex mu_;
  std::vector<std::deque<StepRecord>> queues_;
};

}  // namespace

D4pgResult d4pg_train(const EnvFactory& env_factory, const D4pgHyper& hyper) {
  hyper.support.validate();
  if (hyper.nstep < 1) throw ConfigError("nstep must be >= 1");
  if (hyper.batch < 1) throw ConfigError("batch must be >= 1");

  UplinkEnv probe = env_factory(0);
  const int M = probe.M(), K = probe.K();
  const int num_actors = hyper.num_actors > 0 ? hyper.num_actors : M;
  const int state_dim = K, action_dim = M * K;

  Rng init_rng = Rng::stream(hyper.seed, kInitStream);
  Rng sample_rng = Rng::stream(hyper.seed, kSampleStream);

  Mlp actor, critic;
  {
    MlpConfig actor_cfg;
    actor_cfg.sizes.push_back(state_dim);
    for (int h : hyper.hidden) actor_cfg.sizes.push_back(h);
    actor_cfg.sizes.push_back(action_dim);
    actor_cfg.out_act = hyper.action_act;
    actor_cfg.final_init_bound = 3e-3;
    if (hyper.action_act == OutputActivation::kColumnSoftmax) {
      actor_cfg.softmax_rows = M;
      actor_cfg.softmax_cols = K;
    }
    MlpConfig critic_cfg;
    critic_cfg.sizes.push_back(state_dim + action_dim);
    for (int h : hyper.hidden) critic_cfg.sizes.push_back(h);
    critic_cfg.sizes.push_back(hyper.support.num_atoms);
    critic_cfg.out_act = OutputActivation::kFlatSoftmax;  // atom probabilities
    critic_cfg.final_init_bound = 3e-3;

    actor = Mlp::create(actor_cfg, init_rng);
    critic = Mlp::create(critic_cfg, init_rng);
    {
      // Start the value distribution as a point mass at the atom nearest
      // zero. A fresh softmax head is near-uniform, whose mean sits at the
      // middle of the support and biases every early bootstrap target.
      const std::vector<double> z = hyper.support.atoms();
      int zero_atom = 0;
      for (int i = 1; i < hyper.support.num_atoms; ++i) {
        if (std::abs(z[i]) < std::abs(z[zero_atom])) zero_atom = i;
      }
      std::fill(critic.b.back().begin(), critic.b.back().end(), 0.0);
      critic.b.back()[zero_atom] = 8.0;
    }
    if (!hyper.actor_bias_init.empty()) {
      if (hyper.actor_bias_init.size() != static_cast<size_t>(action_dim)) {
        throw DimensionError("actor_bias_init length != action dim");
      }
      actor.b.back() = hyper.actor_bias_init;
    }
  }
  Mlp actor_target = actor;
  Mlp critic_target = critic;
  AdamState opt_actor = AdamState::create(actor, hyper.lr_actor);
  opt_actor.plain_sgd = hyper.actor_plain_sgd;
  AdamState opt_critic = AdamState::create(critic, hyper.lr_critic);

  std::vector<Worker> workers;
  workers.reserve(num_actors);
  for (int w = 0; w < num_actors; ++w) {
    workers.emplace_back(w, env_factory(w), Rng::stream(hyper.seed, kWorkerNoiseBase + w), actor,
                         hyper.nstep);
  }

  PrioritizedBuffer buffer(hyper.replay_capacity, hyper.priority_floor);
  const long schedule_total = hyper.learner_steps;
  const std::vector<double> atom_values = hyper.support.atoms();
  const int n_atoms = hyper.support.num_atoms;

  D4pgResult result;
  result.curve.reserve(hyper.learner_steps);

  long actor_steps_total = 0;
  long drained_since_log = 0;
  double reward_acc = 0.0;
  auto ingest = [&](const StepRecord& rec) {
    ++actor_steps_total;
    reward_acc += rec.raw_reward;
    ++drained_since_log;
    if (auto traj = workers[rec.worker_id].assembler.add(rec.exp, rec.episode_start)) {
      buffer.push(std::move(*traj));
    }
  };

  // Free-running machinery; idle in deterministic mode.
  ExperienceSink sink(num_actors);
  std::atomic<bool> stop{false};
  std::mutex snapshot_mu;
  std::vector<double> actor_snapshot;
  std::uint64_t snapshot_version = 1;
  std::vector<std::thread> threads;
  if (!hyper.deterministic) {
    actor_snapshot = actor.flatten_params();
    for (int w = 0; w < num_actors; ++w) {
      threads.emplace_back([&, w]() {
        std::uint64_t seen = 1;
        while (!stop.load(std::memory_order_relaxed)) {
          {
            std::lock_guard<std::mutex> lock(snapshot_mu);
            if (snapshot_version != seen) {
              workers[w].actor.assign_params(actor_snapshot);
              seen = snapshot_version;
            }
          }
          sink.push(step_worker(workers[w], hyper, schedule_total));
        }
      });
    }
  }

  auto feed_buffer = [&](size_t need) {
    if (hyper.deterministic) {
      for (int w = 0; w < num_actors; ++w) ingest(step_worker(workers[w], hyper, schedule_total));
      while (buffer.size() < need) {
        for (int w = 0; w < num_actors; ++w) {
          ingest(step_worker(workers[w], hyper, schedule_total));
        }
      }
    } else {
      for (const StepRecord& rec : sink.drain_round()) ingest(rec);
      while (buffer.size() < need) {
        const std::vector<StepRecord> recs = sink.drain_round();
        if (recs.empty()) {
          std::this_thread::sleep_for(std::chrono::microseconds(50));
          continue;
        }
        for (const StepRecord& rec : recs) ingest(rec);
      }
    }
  };

  Mat S0(hyper.batch, state_dim), A0(hyper.batch, action_dim), ST(hyper.batch, state_dim);

  for (long t = 1; t <= hyper.learner_steps; ++t) {
    feed_buffer(static_cast<size_t>(hyper.batch));

    PrioritizedBuffer::Sample sample = buffer.sample(hyper.batch, sample_rng);
    {
      // Importance weights normalized by the batch maximum: the raw
      // (R p_i)^-1 values are unbounded for stale low-priority slots and
      // blow up the critic step.
      double wmax = 0.0;
      for (double w : sample.weights) wmax = std::max(wmax, w);
      if (wmax > 0.0) {
        for (double& w : sample.weights) w /= wmax;
      }
    }

    // Target distributions, bootstrapped from the target nets.
    std::vector<ValueDistribution> targets(hyper.batch);
    {
      for (int i = 0; i < hyper.batch; ++i) {
        const Trajectory& traj = buffer.at(sample.slots[i]);
        std::copy(traj.s[0].begin(), traj.s[0].end(), S0.row(i));
        std::copy(traj.a[0].begin(), traj.a[0].end(), A0.row(i));
        std::copy(traj.s_terminal.begin(), traj.s_terminal.end(), ST.row(i));
      }
      const Mat a_term = actor_target.forward(ST);
      Mat sa(hyper.batch, state_dim + action_dim);
      for (int i = 0; i < hyper.batch; ++i) {
        std::copy(ST.row(i), ST.row(i) + state_dim, sa.row(i));
        for (int c = 0; c < action_dim; ++c) {
          sa(i, state_dim + c) = a_term(i, c) * hyper.scaling.action;
        }
      }
      const Mat boot = critic_target.forward(sa);
      for (int i = 0; i < hyper.batch; ++i) {
        const Trajectory& traj = buffer.at(sample.slots[i]);
        ValueDistribution probs(boot.row(i), boot.row(i) + n_atoms);
        targets[i] = project_nstep(traj.r, hyper.zeta, probs, hyper.support);
      }
    }

    // Critic: importance-weighted binary cross-entropy against the targets;
    // the per-sample loss magnitude becomes its new priority.
    double critic_loss = 0.0;
    {
      Mat sa(hyper.batch, state_dim + action_dim);
      for (int i = 0; i < hyper.batch; ++i) {
        std::copy(S0.row(i), S0.row(i) + state_dim, sa.row(i));
        for (int c = 0; c < action_dim; ++c) {
          sa(i, state_dim + c) = A0(i, c) * hyper.scaling.action;
        }
      }
      Mlp::Cache cache;
      const Mat q = critic.forward(sa, &cache);
      Mat dq(hyper.batch, n_atoms);
      for (int i = 0; i < hyper.batch; ++i) {
        double bce = 0.0;
        for (int a = 0; a < n_atoms; ++a) {
          const double y = targets[i][a];
          const double p = std::clamp(q(i, a), kProbClamp, 1.0 - kProbClamp);
          bce += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
          dq(i, a) = sample.weights[i] / hyper.batch * (-(y / p) + (1.0 - y) / (1.0 - p));
        }
        critic_loss += sample.weights[i] * bce / hyper.batch;
        buffer.update_priority(sample.slots[i], std::abs(bce) + hyper.priority_floor);
      }
      const Mlp::Grads grads = critic.backward(cache, dq);
      adam_step(critic, grads, opt_critic);
    }

    // Actor: ascend E[Z] via the critic's action-input gradient, with the
    // stepped-down learning rate alpha_t.
    double actor_obj = 0.0;
    if (hyper.lr_schedule) {
      opt_actor.lr =
          hyper.lr_actor * (1.0 - static_cast<double>(t) / hyper.learner_steps);
    }
    if (t > hyper.actor_delay) {
      Mlp::Cache actor_cache;
      const Mat a_mu = actor.forward(S0, &actor_cache);
      Mat sa(hyper.batch, state_dim + action_dim);
      for (int i = 0; i < hyper.batch; ++i) {
        std::copy(S0.row(i), S0.row(i) + state_dim, sa.row(i));
        for (int c = 0; c < action_dim; ++c) {
          sa(i, state_dim + c) = a_mu(i, c) * hyper.scaling.action;
        }
      }
      Mlp::Cache critic_cache;
      const Mat q = critic.forward(sa, &critic_cache);
      Mat dq(hyper.batch, n_atoms);
      for (int i = 0; i < hyper.batch; ++i) {
        double mean = 0.0;
        for (int a = 0; a < n_atoms; ++a) {
          mean += q(i, a) * atom_values[a];
          dq(i, a) = atom_values[a] / hyper.batch;
        }
        actor_obj += mean / hyper.batch;
      }
      const Mlp::Grads critic_grads = critic.backward(critic_cache, dq);
      Mat da(hyper.batch, action_dim);
      for (int i = 0; i < hyper.batch; ++i) {
        for (int c = 0; c < action_dim; ++c) {
          da(i, c) = critic_grads.dX(i, state_dim + c) * hyper.scaling.action;
        }
      }
      const Mlp::Grads actor_grads = actor.backward(actor_cache, da);
      adam_step(actor, actor_grads, opt_actor, /*maximize=*/true);
    }

    if (t % hyper.t_target == 0) {
      actor_target = actor;  // hard copy, not Polyak
      critic_target = critic;
    }
    if (t % hyper.t_actors == 0) {
      if (hyper.deterministic) {
        for (Worker& w : workers) w.actor = actor;
      } else {
        std::lock_guard<std::mutex> lock(snapshot_mu);
        actor_snapshot = actor.flatten_params();
        ++snapshot_version;
      }
    }

    D4pgCurvePoint pt;
    pt.learner_step = t;
    pt.actor_steps = actor_steps_total;
    pt.reward = drained_since_log > 0 ? reward_acc / drained_since_log : 0.0;
    pt.critic_loss = critic_loss;
    pt.actor_objective = actor_obj;
    result.curve.push_back(pt);
    reward_acc = 0.0;
    drained_since_log = 0;
  }

  stop.store(true);
  for (std::thread& th : threads) th.join();

  result.actor = actor;
  result.critic = critic;
  result.actor_target = actor_target;
  result.critic_target = critic_target;
  return result;
}

}  // namespace cellfree
