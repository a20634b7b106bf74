#include "cellfree/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cellfree/baselines.hpp"
#include "cellfree/d4pg.hpp"
#include "cellfree/ddpg.hpp"
#include "cellfree/dist.hpp"
#include "cellfree/errors.hpp"

namespace cellfree {

namespace fs = std::filesystem;
using nlohmann::json;

ScenarioConfig ExperimentConfig::scenario_for_seed(std::uint64_t seed) const {
  ScenarioConfig c = preset == "custom" ? scenario : scenario_preset(preset);
  c.seed = seed;
  c.validate();
  return c;
}

std::string ExperimentConfig::canonical_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "preset=" << preset << ";episodes=" << episodes << ";steps=" << steps_per_episode
     << ";batch=" << batch << ";sigma=" << noise_sigma << ";sigma_f=" << noise_sigma_final
     << ";mix=" << noise_mix_sigma << ',' << noise_mix_prob << ";lr=" << lr_actor << ','
     << lr_critic << ";delay=" << actor_delay << ";csi="
     << (csi == CsiMode::kFixedBlock ? "fixed-block" : "per-episode")
     << ";penalty=" << lambda_penalty << ";det=" << deterministic << ";actors=" << actors
     << ";nstep=" << nstep << ";atoms=" << atoms << ";vmin=" << v_min << ";vmax=" << v_max
     << ";t_target=" << t_target << ";t_actors=" << t_actors << ";ga_lr=" << ga_lr
     << ";ga_iters=" << ga_iters << ";act=" << static_cast<int>(action_act);
  os << ";hidden=";
  for (int h : hidden) os << h << ',';
  os << ";dist_hidden=";
  for (int h : dist_hidden) os << h << ',';
  os << ";algos=";
  for (const auto& a : algos) os << a << ',';
  os << ";seeds=";
  for (auto s : seeds) os << s << ',';
  if (preset == "custom") {
    os << ";M=" << scenario.M << ";K=" << scenario.K << ";radius=" << scenario.radius_m
       << ";kappa=" << scenario.kappa << ";sh=" << scenario.sigma_sh_db
       << ";delta=" << scenario.delta;
  }
  return os.str();
}

std::uint64_t config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct SeedContext {
  UplinkEnv env;
  Mat W_conjugate;
  Mat W_mmse;
  Mat warm_start;               // estimate-based design the learners start from
  std::vector<int> est_order;   // SIC order seen through the estimates
  double mmse_rate = 1.0;       // normalization divisor
  double reward_scale = 1.0;
  double warm_reward = 0.0;     // env reward of the warm start (baseline)
};

SeedContext make_seed_context(const ExperimentConfig& cfg, std::uint64_t seed) {
  UplinkEnv::Options opts;
  opts.lambda_penalty = cfg.lambda_penalty;
  opts.csi = cfg.csi;
  SeedContext ctx{UplinkEnv(generate_scenario(cfg.scenario_for_seed(seed)), opts),
                  Mat{}, Mat{}, Mat{}, {}, 1.0, 1.0};

  const EstimationResult& est = ctx.env.channel().est;
  Mat ghat_abs(est.Ghat2.rows, est.Ghat2.cols);
  for (size_t i = 0; i < ghat_abs.size(); ++i) ghat_abs.a[i] = std::sqrt(est.Ghat2.a[i]);
  ctx.W_conjugate = conjugate_beamforming(ghat_abs);

  const LinkPowers lp_est = ctx.env.estimated_link_powers();
  ctx.est_order = lp_est.sic_order;
  ctx.W_mmse = mmse_beamforming(lp_est);
  ctx.warm_start = estimate_based_warm_start(
      lp_est, ctx.env.scenario().config.sic_sensitivity_linear(), /*noise_sigma=*/3e-4);

  ctx.mmse_rate = sum_rate(ctx.env.gamma_of(ctx.W_mmse));
  ctx.reward_scale = ctx.mmse_rate > 0.0 ? 1.0 / ctx.mmse_rate : 1.0;
  ctx.warm_reward = ctx.env.reward_of(ctx.warm_start);
  return ctx;
}

void write_step_curve(const std::string& path, const std::vector<CurvePoint>& curve) {
  std::ofstream out(path);
  out.precision(17);
  out << "step,reward,critic_loss,actor_objective\n";
  for (const CurvePoint& p : curve) {
    out << p.step << ',' << p.reward << ',' << p.critic_loss << ',' << p.actor_objective << '\n';
  }
}

void write_constant_curve(const std::string& path, long steps, double reward) {
  std::ofstream out(path);
  out.precision(17);
  out << "step,reward\n";
  for (long t = 0; t < steps; ++t) out << t << ',' << reward << '\n';
}

void write_d4pg_curve(const std::string& path, const std::vector<D4pgCurvePoint>& curve) {
  std::ofstream out(path);
  out.precision(17);
  out << "learner_step,actor_steps,reward,critic_loss,actor_objective\n";
  for (const D4pgCurvePoint& p : curve) {
    out << p.learner_step << ',' << p.actor_steps << ',' << p.reward << ',' << p.critic_loss
        << ',' << p.actor_objective << '\n';
  }
}

void write_dist_curve(const std::string& path, const DistResult& res) {
  std::ofstream out(path);
  out.precision(17);
  out << "round,assembled_reward";
  const size_t agents = res.curve.empty() ? 0 : res.curve.front().agent_best_rewards.size();
  for (size_t m = 0; m < agents; ++m) out << ",agent_" << m << "_best";
  out << '\n';
  for (const DistRoundPoint& p : res.curve) {
    out << p.round << ',' << p.assembled_reward;
    for (double b : p.agent_best_rewards) out << ',' << b;
    out << '\n';
  }
}

double tail_mean(const std::vector<double>& xs, size_t n) {
  if (xs.empty()) return 0.0;
  const size_t take = std::min(n, xs.size());
  double acc = 0.0;
  for (size_t i = xs.size() - take; i < xs.size(); ++i) acc += xs[i];
  return acc / take;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const std::string canonical = cfg.canonical_string();
  const std::uint64_t hash = config_hash(canonical);

  ExperimentOutcome outcome;
  const long total_steps = static_cast<long>(cfg.episodes) * cfg.steps_per_episode;

  for (std::uint64_t seed : cfg.seeds) {
    SeedContext ctx = make_seed_context(cfg, seed);
    const int M = ctx.env.M(), K = ctx.env.K();

    for (const std::string& algo : cfg.algos) {
      AlgoSeedOutcome res;
      res.seed = seed;
      res.mmse_rate = ctx.mmse_rate;
      const std::string path =
          (fs::path(cfg.out_dir) / (algo + "_seed" + std::to_string(seed) + ".csv")).string();
      res.curve_path = path;

      if (algo == "conjugate" || algo == "mmse") {
        // Fixed beamformers act in the same environment as the learners:
        // their curve is the (feasibility-aware) env reward, constant on
        // the block. The raw sum-rate is recorded alongside; the MMSE rate
        // is the normalization divisor.
        const Mat& W = algo == "mmse" ? ctx.W_mmse : ctx.W_conjugate;
        res.final_reward = ctx.env.reward_of(W);
        res.rate = sum_rate(ctx.env.gamma_of(W));
        write_constant_curve(path, total_steps, res.final_reward);
      } else if (algo == "grad-ascent") {
        GradientAscentOptions ga;
        ga.lr = cfg.ga_lr;
        ga.iters = cfg.ga_iters;
        const GradientAscentResult ga_res =
            gradient_ascent(ctx.env, ordered_anchor(ctx.est_order, M), ga);
        res.final_reward = ga_res.best_reward;
        res.rate = ga_res.best_reward;
        std::ofstream out(path);
        out.precision(17);
        out << "iter,best_reward\n";
        for (size_t i = 0; i < ga_res.accepted_rewards.size(); ++i) {
          out << i << ',' << ga_res.accepted_rewards[i] << '\n';
        }
      } else if (algo == "ddpg") {
        DdpgHyper hyper;
        hyper.episodes = cfg.episodes;
        hyper.steps_per_episode = cfg.steps_per_episode;
        hyper.batch = cfg.batch;
        hyper.lr_actor = cfg.lr_actor;
        hyper.lr_critic = cfg.lr_critic;
        hyper.actor_plain_sgd = true;
        hyper.actor_delay = cfg.actor_delay;
        hyper.noise_sigma = cfg.noise_sigma;
        hyper.noise_sigma_final = cfg.noise_sigma_final;
        hyper.noise_mix_sigma = cfg.noise_mix_sigma;
        hyper.noise_mix_prob = cfg.noise_mix_prob;
        hyper.hidden = cfg.hidden;
        hyper.action_act = cfg.action_act;
        hyper.reward_scale = ctx.reward_scale;
        hyper.reward_baseline = ctx.warm_reward;
        hyper.actor_bias_init = policy_bias_for(ctx.warm_start, cfg.action_act);
        hyper.scaling.state = 0.1;
        hyper.scaling.action = cfg.action_act == OutputActivation::kSigmoid
                                   ? 4.0
                                   : static_cast<double>(M) * K;
        hyper.seed = seed;
        const DdpgResult r = ddpg_train(ctx.env, hyper);
        std::vector<double> rewards;
        rewards.reserve(r.curve.size());
        for (const CurvePoint& p : r.curve) rewards.push_back(p.reward);
        res.final_reward = tail_mean(rewards, 100);
        res.rate = res.final_reward;
        write_step_curve(path, r.curve);
        save_checkpoint(r.core.actor,
                        (fs::path(cfg.out_dir) / ("ddpg_actor_seed" + std::to_string(seed) +
                                                  ".bin")).string());
      } else if (algo == "d4pg") {
        D4pgHyper hyper;
        hyper.learner_steps = total_steps;
        hyper.steps_per_episode = cfg.steps_per_episode;
        hyper.batch = cfg.batch;
        hyper.nstep = cfg.nstep;
        hyper.support = {cfg.atoms, cfg.v_min, cfg.v_max};
        hyper.t_target = cfg.t_target;
        hyper.t_actors = cfg.t_actors;
        hyper.num_actors = cfg.actors;
        hyper.lr_actor = cfg.lr_actor;
        hyper.lr_critic = cfg.lr_critic;
        hyper.actor_plain_sgd = true;
        hyper.actor_delay = cfg.actor_delay;
        hyper.noise_sigma = cfg.noise_sigma;
        hyper.noise_sigma_final = cfg.noise_sigma_final;
        hyper.noise_mix_sigma = cfg.noise_mix_sigma;
        hyper.noise_mix_prob = cfg.noise_mix_prob;
        hyper.hidden = cfg.hidden;
        hyper.action_act = cfg.action_act;
        hyper.reward_scale = ctx.reward_scale;
        hyper.reward_baseline = ctx.warm_reward;
        hyper.actor_bias_init = policy_bias_for(ctx.warm_start, cfg.action_act);
        hyper.scaling.state = 0.1;
        hyper.scaling.action = cfg.action_act == OutputActivation::kSigmoid
                                   ? 4.0
                                   : static_cast<double>(M) * K;
        hyper.deterministic = cfg.deterministic;
        hyper.seed = seed;
        UplinkEnv::Options opts = ctx.env.options();
        const Scenario scen = ctx.env.scenario();
        const D4pgResult r = d4pg_train(
            [&scen, &opts](int) { return UplinkEnv(scen, opts); }, hyper);
        std::vector<double> rewards;
        rewards.reserve(r.curve.size());
        for (const D4pgCurvePoint& p : r.curve) rewards.push_back(p.reward);
        res.final_reward = tail_mean(rewards, 100);
        res.rate = res.final_reward;
        write_d4pg_curve(path, r.curve);
        save_checkpoint(r.actor,
                        (fs::path(cfg.out_dir) / ("d4pg_actor_seed" + std::to_string(seed) +
                                                  ".bin")).string());
      } else if (algo == "dist") {
        DistHyper hyper;
        hyper.rounds = cfg.episodes;
        hyper.agent.steps_per_episode = cfg.steps_per_episode;
        hyper.agent.batch = cfg.batch;
        hyper.agent.noise_sigma = cfg.noise_sigma;
        hyper.agent.hidden = cfg.dist_hidden.empty() ? cfg.hidden : cfg.dist_hidden;
        hyper.agent.action_act = cfg.action_act;
        hyper.agent.lr_actor = cfg.lr_actor;
        hyper.agent.lr_critic = cfg.lr_critic;
        hyper.agent.actor_plain_sgd = true;
        hyper.agent.actor_delay = cfg.actor_delay / 2;
        hyper.agent.noise_sigma = cfg.noise_sigma;
        hyper.agent.noise_sigma_final = cfg.noise_sigma_final;
        hyper.agent.noise_mix_sigma = cfg.noise_mix_sigma;
        hyper.agent.noise_mix_prob = cfg.noise_mix_prob;
        hyper.agent.reward_scale = ctx.reward_scale;
        hyper.agent.reward_baseline = ctx.warm_reward;
        hyper.agent.scaling.state = 0.1;
        hyper.agent.scaling.action = cfg.action_act == OutputActivation::kSigmoid ? 4.0 : K;
        hyper.agent.seed = seed;
        hyper.deterministic = cfg.deterministic;
        hyper.seed = seed;
        hyper.warm_start = ctx.warm_start;
        const DistResult r =
            dist_train(ctx.env.scenario(), hyper, ctx.env.options());
        res.final_reward = r.curve.empty() ? 0.0 : r.curve.back().assembled_reward;
        res.rate = res.final_reward;
        write_dist_curve(path, r);
      } else {
        throw ConfigError("unknown algo: " + algo);
      }

      // Normalization is by the per-block MMSE sum-rate; the MMSE entry is
      // the divisor itself, so its normalized value is one by construction.
      if (algo == "mmse") {
        res.normalized = 1.0;
      } else {
        res.normalized = ctx.mmse_rate > 0.0 ? res.final_reward / ctx.mmse_rate : 0.0;
      }
      outcome.per_algo[algo].push_back(std::move(res));
    }
  }

  // summary.json: per-algo aggregates over the seeds.
  json summary;
  summary["schema_version"] = 1;
  summary["config_hash"] = hash;
  summary["preset"] = cfg.preset;
  for (const auto& [algo, runs] : outcome.per_algo) {
    json entry;
    std::vector<double> normalized;
    for (const AlgoSeedOutcome& r : runs) {
      normalized.push_back(r.normalized);
      entry["per_seed"].push_back({{"seed", r.seed},
                                   {"final_reward", r.final_reward},
                                   {"rate", r.rate},
                                   {"normalized", r.normalized},
                                   {"mmse_rate", r.mmse_rate},
                                   {"curve", r.curve_path}});
    }
    const double mean =
        std::accumulate(normalized.begin(), normalized.end(), 0.0) / normalized.size();
    double var = 0.0;
    for (double v : normalized) var += (v - mean) * (v - mean);
    entry["mean_normalized"] = mean;
    entry["std_normalized"] = normalized.size() > 1 ? std::sqrt(var / (normalized.size() - 1)) : 0.0;
    summary["algos"][algo] = entry;
  }
  outcome.summary_path = (fs::path(cfg.out_dir) / "summary.json").string();
  std::ofstream(outcome.summary_path) << summary.dump(2) << '\n';

  // manifest.json: the full configuration, reproducibly hashed.
  json manifest;
  manifest["schema_version"] = 1;
  manifest["config_hash"] = hash;
  manifest["canonical"] = canonical;
  manifest["preset"] = cfg.preset;
  manifest["algos"] = cfg.algos;
  manifest["seeds"] = cfg.seeds;
  manifest["episodes"] = cfg.episodes;
  manifest["steps_per_episode"] = cfg.steps_per_episode;
  manifest["batch"] = cfg.batch;
  manifest["noise_sigma"] = cfg.noise_sigma;
  manifest["hidden"] = cfg.hidden;
  manifest["dist_hidden"] = cfg.dist_hidden;
  manifest["csi"] = cfg.csi == CsiMode::kFixedBlock ? "fixed-block" : "per-episode";
  manifest["lambda_penalty"] = cfg.lambda_penalty;
  manifest["deterministic"] = cfg.deterministic;
  manifest["d4pg"] = {{"actors", cfg.actors},   {"nstep", cfg.nstep},
                      {"atoms", cfg.atoms},     {"v_min", cfg.v_min},
                      {"v_max", cfg.v_max},     {"t_target", cfg.t_target},
                      {"t_actors", cfg.t_actors}};
  if (!cfg.deterministic) {
    manifest["wall_clock_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
  }
  outcome.manifest_path = (fs::path(cfg.out_dir) / "manifest.json").string();
  std::ofstream(outcome.manifest_path) << manifest.dump(2) << '\n';

  return outcome;
}

FlopsReport flops_report(int M, int K, const std::vector<int>& hidden, FlopsScheme scheme) {
  if (M < 1 || K < 1 || hidden.empty()) throw ConfigError("flops_report: bad sizes");
  FlopsReport rep;
  const long long out =
      scheme == FlopsScheme::kDistributedLearning ? K : static_cast<long long>(M) * K;
  long long acc = static_cast<long long>(hidden.front()) * K;  // input layer: |S| = K
  acc += static_cast<long long>(hidden.back()) * out;          // output layer
  for (size_t i = 1; i < hidden.size(); ++i) {
    acc += static_cast<long long>(hidden[i - 1]) * hidden[i];
  }
  rep.drl_flops = 2 * acc;
  rep.mmse_order = static_cast<long long>(M) * K * M * K;

  std::ostringstream os;
  os << "2*(" << hidden.front() << "*" << K << " + " << hidden.back() << "*" << out;
  for (size_t i = 1; i < hidden.size(); ++i) os << " + " << hidden[i - 1] << "*" << hidden[i];
  os << ")";
  rep.formula = os.str();
  return rep;
}

std::vector<TimingRow> timing_report(const TimingOptions& opt) {
  std::vector<TimingRow> rows;
  using clock = std::chrono::steady_clock;

  for (int M = opt.m_begin; M <= opt.m_end; M += opt.m_step) {
    const int K = std::max(1, M / 3);
    TimingRow row;
    row.M = M;
    row.K = K;

    // Policy inference latency: weight values do not affect it.
    {
      Rng rng(42);
      MlpConfig cfg;
      cfg.sizes.push_back(K);
      for (int h : opt.hidden) cfg.sizes.push_back(h);
      cfg.sizes.push_back(M * K);
      cfg.out_act = OutputActivation::kFlatSoftmax;
      const Mlp policy = Mlp::create(cfg, rng);
      std::vector<double> state(K, 1.0);
      volatile double sink = 0.0;
      const auto t0 = clock::now();
      for (int r = 0; r < opt.inference_reps; ++r) sink += policy.forward1(state)[0];
      const auto t1 = clock::now();
      row.t_inference_s =
          std::chrono::duration<double>(t1 - t0).count() / opt.inference_reps;
      (void)sink;
    }

    // Gradient-ascent run on a matching scenario.
    {
      ScenarioConfig sc;
      sc.M = M;
      sc.K = K;
      sc.seed = 7;
      UplinkEnv env(generate_scenario(sc));
      Mat W0(M, K, 0.5);
      GradientAscentOptions ga;
      ga.iters = opt.ga_iters;
      const auto t0 = clock::now();
      const GradientAscentResult res = gradient_ascent(env, W0, ga);
      const auto t1 = clock::now();
      row.t_gradascent_s = std::chrono::duration<double>(t1 - t0).count();
      (void)res;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_timing_csv(const std::vector<TimingRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "M,K,t_inference,t_gradascent\n";
  for (const TimingRow& r : rows) {
    out << r.M << ',' << r.K << ',' << r.t_inference_s << ',' << r.t_gradascent_s << '\n';
  }
}

}  // namespace cellfree
