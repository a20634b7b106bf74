// Acceptance suite: one self-contained check per shipping criterion, each
// printing PASS or FAIL with the measured numbers. Exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "cellfree/baselines.hpp"
#include "cellfree/d4pg.hpp"
#include "cellfree/ddpg.hpp"
#include "cellfree/dist.hpp"
#include "cellfree/errors.hpp"
#include "cellfree/harness.hpp"

using namespace cellfree;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Estimator optimality: Monte-Carlo MSE of the MMSE constant beats every
//    scale on the grid {0.5, 0.9, 1.1, 2} x E, 1e5 trials, 10 configs.
void criterion_1() {
  const auto t0 = clock_type::now();
  Rng cfg_rng(2024);
  const double scales[] = {0.5, 0.9, 1.1, 2.0};
  bool all_ok = true;

  for (int config = 0; config < 10; ++config) {
    const int K = 1 + static_cast<int>(cfg_rng.uniform() * 3.0);
    const int tau_p = 1 + static_cast<int>(cfg_rng.uniform() * K);
    const double rho = 0.5 + 4.0 * cfg_rng.uniform();
    Mat F(1, K);
    for (double& f : F.a) f = 0.2 + 2.0 * cfg_rng.uniform();

    const PilotPlan pilots = build_pilots(K, tau_p, rho);
    const int trials = 100000;
    Rng rng(5000 + config);

    double mse_opt = 0.0;
    double mse_grid[4] = {};
    for (int t = 0; t < trials; ++t) {
      FadingBlock block;
      block.F = F;
      block.H2 = Mat(1, K);
      for (double& h : block.H2.a) h = rng.gamma(1.0, 1.0);
      block.G2 = compose_gains(block.F, block.H2);
      const EstimationResult res = estimate_gains(block, pilots, 1.0, 1.0, rng);
      const std::complex<double> g = res.Gtrue(0, 0);
      const std::complex<double> y = res.Ydot(0, 0);
      const double e = res.E(0, 0);
      mse_opt += std::norm(e * y - g) / trials;
      for (int i = 0; i < 4; ++i) mse_grid[i] += std::norm(scales[i] * e * y - g) / trials;
    }
    for (int i = 0; i < 4; ++i) {
      if (mse_opt > mse_grid[i]) all_ok = false;
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "MMSE-scale MSE minimal on the {0.5,0.9,1.1,2} grid, 10 configs x 1e5 trials, "
     << std::fixed << dt << " s";
  report(1, all_ok && dt < 30.0, os.str());
}

// ---------------------------------------------------------------------------
// 2. SINR oracle equivalence: term-by-term received-power enumerator vs
//    compute_sinr for 50 random small instances, relative error <= 1e-9.
std::vector<double> oracle_sinr(const Mat& W, const Mat& G2, const Mat& E, const Mat& X,
                                const std::vector<double>& rho, const std::vector<double>& p,
                                double tau) {
  const int M = G2.rows, K = G2.cols;
  std::vector<double> colsum(K, 0.0);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) colsum[k] += tau * rho[k] * p[k] * E(m, k) * E(m, k) * G2(m, k);
  }
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return colsum[a] < colsum[b]; });
  std::vector<int> pos(K);
  for (int i = 0; i < K; ++i) pos[order[i]] = i;

  std::vector<double> gamma(K, 0.0);
  for (int k = 0; k < K; ++k) {
    double signal = 0.0, interference = 0.0, sigma_dot = 0.0;
    for (int m = 0; m < M; ++m) {
      const double w2 = W(m, k) * W(m, k);
      signal += w2 * tau * rho[k] * p[k] * E(m, k) * E(m, k) * G2(m, k);
      for (int l = 0; l < K; ++l) {
        if (l != k && pos[l] > pos[k]) {
          interference += w2 * tau * rho[l] * p[l] * E(m, l) * E(m, l) * G2(m, l);
        }
      }
      for (int v = 0; v < K; ++v) {
        if (v == k) continue;
        interference += w2 * tau * rho[v] * p[k] * E(m, k) * E(m, k) * X(k, v) * G2(m, v);
      }
      for (int q = 0; q < K; ++q) {
        if (q == k) continue;
        for (int u = 0; u < K; ++u) {
          if (u == q) continue;
          interference += w2 * tau * rho[u] * p[q] * E(m, q) * E(m, q) * X(q, u) * G2(m, u);
        }
      }
      double noise = 1.0;
      for (int z = 0; z < K; ++z) noise += p[z] * E(m, z) * E(m, z) * X(z, z);
      sigma_dot += w2 * noise;
    }
    gamma[k] = sigma_dot > 0.0 ? signal / (interference + sigma_dot) : 0.0;
  }
  return gamma;
}

void criterion_2() {
  Rng rng(77);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int M = 1 + static_cast<int>(rng.uniform() * 3.0);
    const int K = 1 + static_cast<int>(rng.uniform() * 2.0);
    const int tau = 1 + static_cast<int>(rng.uniform() * K);
    const PilotPlan pilots = build_pilots(K, tau, 1.0 + rng.uniform());
    FadingBlock block;
    block.F = Mat(M, K);
    block.H2 = Mat(M, K);
    for (size_t i = 0; i < block.F.size(); ++i) {
      block.F.a[i] = 0.05 + 2.0 * rng.uniform();
      block.H2.a[i] = rng.gamma(1.0, 1.0);
    }
    block.G2 = compose_gains(block.F, block.H2);
    const EstimationResult est = estimate_gains(block, pilots, 1.0, 1.0, rng);
    SicConfig sic;
    sic.p.resize(K);
    for (double& v : sic.p) v = 0.5 + 2.0 * rng.uniform();
    sic.sensitivity = 0.1;
    const LinkPowers lp = build_link_powers(block, est, pilots, sic);
    Mat W(M, K);
    for (double& w : W.a) w = rng.uniform();

    const std::vector<double> got = compute_sinr(W, lp);
    const std::vector<double> want = oracle_sinr(W, block.G2, est.E, pilots.matrix.cross_gram(),
                                                 pilots.config.rho, sic.p, tau);
    for (int k = 0; k < K; ++k) {
      const double denom = std::max(std::abs(want[k]), 1e-300);
      worst = std::max(worst, std::abs(got[k] - want[k]) / denom);
    }
  }
  std::ostringstream os;
  os << "compute_sinr vs term-by-term oracle, 50 instances, max rel err " << worst;
  report(2, worst <= 1e-9, os.str());
}

// ---------------------------------------------------------------------------
// 3. Constraint count: exactly K(K-1)/2 conditions for K in 2..6.
void criterion_3() {
  Rng rng(99);
  bool ok = true;
  std::ostringstream os;
  os << "SIC condition counts:";
  for (int K = 2; K <= 6; ++K) {
    const PilotPlan pilots = build_pilots(K, K, 1.0);
    FadingBlock block;
    block.F = Mat(3, K, 1.0);
    block.H2 = Mat(3, K);
    for (double& h : block.H2.a) h = rng.gamma(1.0, 1.0);
    block.G2 = compose_gains(block.F, block.H2);
    const EstimationResult est = estimate_gains(block, pilots, 1.0, 1.0, rng);
    SicConfig sic;
    sic.p.assign(K, 1.0);
    sic.sensitivity = 0.5;
    const LinkPowers lp = build_link_powers(block, est, pilots, sic);
    Mat W(3, K, 0.5);
    const SicCheck check = check_sic_constraints(W, lp, sic.sensitivity);
    os << ' ' << K << "->" << check.conditions_checked;
    if (check.conditions_checked != K * (K - 1) / 2) ok = false;
  }
  report(3, ok, os.str());
}

// ---------------------------------------------------------------------------
// 4. Gradient correctness: backward vs central differences over 100 random
//    nets and inputs, max rel err <= 1e-4; chained actor-through-critic
//    gradient meets the same bar.
double net_fd_max_rel(const Mlp& net, Rng& rng) {
  std::vector<double> x(net.input_size());
  for (double& v : x) v = rng.uniform(-1.5, 1.5);
  std::vector<double> c(net.output_size());
  for (double& v : c) v = rng.uniform(-1.0, 1.0);

  Mat X(1, net.input_size());
  X.a = x;
  Mlp::Cache cache;
  net.forward(X, &cache);
  Mat dY(1, net.output_size());
  dY.a = c;
  const Mlp::Grads grads = net.backward(cache, dY);

  auto loss = [&](const Mlp& n, const std::vector<double>& in) {
    const std::vector<double> y = n.forward1(in);
    double l = 0.0;
    for (size_t i = 0; i < y.size(); ++i) l += c[i] * y[i];
    return l;
  };

  const double h = 1e-6;
  double max_rel = 0.0;
  std::vector<double> params = net.flatten_params();
  const size_t stride = std::max<size_t>(1, params.size() / 24);
  for (size_t i = 0; i < params.size(); i += stride) {
    std::vector<double> up = params, dn = params;
    up[i] += h;
    dn[i] -= h;
    Mlp nu = net, nd = net;
    nu.assign_params(up);
    nd.assign_params(dn);
    const double numeric = (loss(nu, x) - loss(nd, x)) / (2 * h);
    size_t at = 0;
    double analytic = 0.0;
    for (int l = 0; l < net.num_layers(); ++l) {
      if (i < at + net.W[l].size()) {
        analytic = grads.dW[l].a[i - at];
        break;
      }
      at += net.W[l].size();
      if (i < at + net.b[l].size()) {
        analytic = grads.db[l][i - at];
        break;
      }
      at += net.b[l].size();
    }
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
  }
  for (int i = 0; i < net.input_size(); ++i) {
    std::vector<double> up = x, dn = x;
    up[i] += h;
    dn[i] -= h;
    const double numeric = (loss(net, up) - loss(net, dn)) / (2 * h);
    const double denom = std::max({std::abs(grads.dX(0, i)), std::abs(numeric), 1e-6});
    max_rel = std::max(max_rel, std::abs(grads.dX(0, i) - numeric) / denom);
  }
  return max_rel;
}

void criterion_4() {
  Rng rng(4242);
  double worst = 0.0;
  const OutputActivation acts[] = {OutputActivation::kLinear, OutputActivation::kSigmoid,
                                   OutputActivation::kFlatSoftmax,
                                   OutputActivation::kColumnSoftmax};
  for (int rep = 0; rep < 100; ++rep) {
    MlpConfig cfg;
    const int in = 2 + static_cast<int>(rng.uniform() * 4.0);
    const int h1 = 4 + static_cast<int>(rng.uniform() * 8.0);
    const int rows = 2 + static_cast<int>(rng.uniform() * 2.0);
    const int cols = 2 + static_cast<int>(rng.uniform() * 2.0);
    cfg.out_act = acts[rep % 4];
    const int out =
        cfg.out_act == OutputActivation::kColumnSoftmax ? rows * cols
                                                        : 2 + static_cast<int>(rng.uniform() * 6.0);
    cfg.sizes = {in, h1, out};
    if (cfg.out_act == OutputActivation::kColumnSoftmax) {
      cfg.softmax_rows = rows;
      cfg.softmax_cols = cols;
    }
    Mlp net = Mlp::create(cfg, rng);
    worst = std::max(worst, net_fd_max_rel(net, rng));
  }

  // chained actor-through-critic gradient
  double worst_chain = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    DdpgHyper h;
    h.hidden = {8, 6};
    h.action_act = OutputActivation::kSigmoid;
    Rng init(900 + rep);
    DdpgCore core = DdpgCore::create(2, 2, 2, h, init);
    const int adim = core.actor.output_size();
    std::vector<double> s = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

    Mat S(1, 2);
    S.a = s;
    Mlp::Cache actor_cache;
    const Mat a_mu = core.actor.forward(S, &actor_cache);
    Mat sa(1, 2 + adim);
    std::copy(s.begin(), s.end(), sa.row(0));
    std::copy(a_mu.row(0), a_mu.row(0) + adim, sa.row(0) + 2);
    Mlp::Cache critic_cache;
    core.critic.forward(sa, &critic_cache);
    Mat dq(1, 1, 1.0);
    const Mlp::Grads cg = core.critic.backward(critic_cache, dq);
    Mat da(1, adim);
    for (int i = 0; i < adim; ++i) da(0, i) = cg.dX(0, 2 + i);
    const Mlp::Grads ag = core.actor.backward(actor_cache, da);

    auto composite = [&](const Mlp& actor) {
      const std::vector<double> a = actor.forward1(s);
      std::vector<double> x = s;
      x.insert(x.end(), a.begin(), a.end());
      return core.critic.forward1(x)[0];
    };
    std::vector<double> params = core.actor.flatten_params();
    const double fdh = 1e-6;
    const size_t stride = std::max<size_t>(1, params.size() / 16);
    for (size_t i = 0; i < params.size(); i += stride) {
      std::vector<double> up = params, dn = params;
      up[i] += fdh;
      dn[i] -= fdh;
      Mlp au = core.actor, ad = core.actor;
      au.assign_params(up);
      ad.assign_params(dn);
      const double numeric = (composite(au) - composite(ad)) / (2 * fdh);
      size_t at = 0;
      double analytic = 0.0;
      for (int l = 0; l < core.actor.num_layers(); ++l) {
        if (i < at + core.actor.W[l].size()) {
          analytic = ag.dW[l].a[i - at];
          break;
        }
        at += core.actor.W[l].size();
        if (i < at + core.actor.b[l].size()) {
          analytic = ag.db[l][i - at];
          break;
        }
        at += core.actor.b[l].size();
      }
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst_chain = std::max(worst_chain, std::abs(analytic - numeric) / denom);
    }
  }

  std::ostringstream os;
  os << "backward vs finite differences: nets max rel " << worst << ", chained max rel "
     << worst_chain;
  report(4, worst <= 1e-4 && worst_chain <= 1e-4, os.str());
}

// ---------------------------------------------------------------------------
// 5. Distributional machinery.
void criterion_5() {
  DistributionSupport support{51, -20.0, 100.0};
  Rng rng(555);

  bool mass_ok = true;
  for (int rep = 0; rep < 1000; ++rep) {
    ValueDistribution probs(51);
    double total = 0.0;
    for (double& p : probs) {
      p = rng.uniform();
      total += p;
    }
    for (double& p : probs) p /= total;
    std::vector<double> shifted(51);
    for (double& z : shifted) z = rng.uniform(-80.0, 200.0);
    const ValueDistribution out = categorical_projection(probs, shifted, support);
    double sum = 0.0;
    for (double p : out) sum += p;
    if (std::abs(sum - 1.0) > 1e-9) mass_ok = false;
  }

  // N = 1 equals the single-step target bit for bit
  ValueDistribution boot(51);
  double total = 0.0;
  for (double& p : boot) {
    p = rng.uniform();
    total += p;
  }
  for (double& p : boot) p /= total;
  const double r = 2.5, zeta = 0.99;
  std::vector<double> shifted = support.atoms();
  for (double& z : shifted) z = r + zeta * z;
  const bool n1_ok = project_nstep({r}, zeta, boot, support) ==
                     categorical_projection(boot, shifted, support);

  // N = 5, zeta = 0.99, unit rewards, zero-mean bootstrap
  const std::vector<double> atoms = support.atoms();
  int lo = 0;
  while (atoms[lo + 1] <= 0.0) ++lo;
  const double frac = (0.0 - atoms[lo]) / (atoms[lo + 1] - atoms[lo]);
  ValueDistribution zero_boot(51, 0.0);
  zero_boot[lo] = 1.0 - frac;
  zero_boot[lo + 1] = frac;
  const ValueDistribution target =
      project_nstep(std::vector<double>(5, 1.0), 0.99, zero_boot, support);
  const double mean = distribution_mean(target, support);
  const bool mean_ok = std::abs(mean - 4.90099501) <= support.spacing();

  std::ostringstream os;
  os << "projection mass conserved (1000 shifts); N=1 target bit-exact; N=5 mean " << mean
     << " within one atom spacing of 4.90099";
  report(5, mass_ok && n1_ok && mean_ok, os.str());
}

// ---------------------------------------------------------------------------
// 6. PER statistics: priorities [3, 1] sample at 0.75 within 3 sigma.
void criterion_6() {
  PrioritizedBuffer buf(2);
  Trajectory t;
  t.s = {{0.0}};
  t.a = {{0.0}};
  t.r = {0.0};
  t.s_terminal = {0.0};
  const size_t s0 = buf.push(t);
  const size_t s1 = buf.push(t);
  buf.update_priority(s0, 3.0);
  buf.update_priority(s1, 1.0);

  Rng rng(66);
  const int draws = 100000;
  int first = 0;
  for (int d = 0; d < draws; ++d) {
    if (buf.sample(1, rng).slots[0] == s0) ++first;
  }
  const double expect = 0.75 * draws;
  const double sigma = std::sqrt(draws * 0.75 * 0.25);
  std::ostringstream os;
  os << "priorities [3,1]: sampled " << first << "/" << draws << " vs " << expect << " +- "
     << 3.0 * sigma;
  report(6, std::abs(first - expect) < 3.0 * sigma, os.str());
}

// ---------------------------------------------------------------------------
// 7. FLOPs report closed forms.
void criterion_7() {
  const auto cen = flops_report(15, 5, {256, 128}, FlopsScheme::kCentralized);
  const auto dl = flops_report(15, 5, {256, 128}, FlopsScheme::kDistributedLearning);
  std::ostringstream os;
  os << "centralized M=15 K=5 -> " << cen.drl_flops << " (want 87296); distributed -> "
     << dl.drl_flops << " (want 69376)";
  report(7, cen.drl_flops == 87296 && dl.drl_flops == 69376, os.str());
}

// ---------------------------------------------------------------------------
// 8. Inference latency under one second at M=150, K=50; a gradient-ascent
//    run at M=15 at least 10x the policy inference time.
void criterion_8() {
  Rng rng(8);
  MlpConfig cfg;
  cfg.sizes = {50, 256, 128, 150 * 50};
  cfg.out_act = OutputActivation::kFlatSoftmax;
  const Mlp policy = Mlp::create(cfg, rng);
  std::vector<double> state(50, 1.0);

  volatile double sink = 0.0;
  const auto t0 = clock_type::now();
  const int reps = 10;
  for (int r = 0; r < reps; ++r) sink += policy.forward1(state)[0];
  const double t_inf = seconds_since(t0) / reps;
  (void)sink;

  ScenarioConfig sc = scenario_preset("small");
  sc.seed = 8;
  UplinkEnv env(generate_scenario(sc));
  Mat W0 = ordered_anchor(env.estimated_link_powers().sic_order, env.M());
  const auto t1 = clock_type::now();
  GradientAscentOptions opt;
  opt.iters = 100;
  gradient_ascent(env, W0, opt);
  const double t_ga = seconds_since(t1);

  std::ostringstream os;
  os << "policy inference (M=150, K=50) " << t_inf << " s; grad-ascent run (M=15) " << t_ga
     << " s (" << t_ga / t_inf << "x)";
  report(8, t_inf < 1.0 && t_ga >= 10.0 * t_inf, os.str());
}

// ---------------------------------------------------------------------------
// 9. Desk-scale method ordering, 3 seeds, 6000 steps, 15-minute budget.
void criterion_9() {
  const auto t0 = clock_type::now();
  ExperimentConfig cfg;
  cfg.preset = "small";
  cfg.algos = {"conjugate", "mmse", "ddpg", "d4pg", "dist"};
  cfg.seeds = {1, 2, 3};
  cfg.episodes = 6;
  cfg.steps_per_episode = 1000;
  cfg.out_dir = "acceptance_out";

  const ExperimentOutcome out = run_experiment(cfg);
  const double dt = seconds_since(t0);

  auto mean_norm = [&](const std::string& algo) {
    const auto& runs = out.per_algo.at(algo);
    double acc = 0.0;
    for (const auto& r : runs) acc += r.normalized;
    return acc / runs.size();
  };
  const double conj = mean_norm("conjugate");
  const double ddpg = mean_norm("ddpg");
  const double d4pg = mean_norm("d4pg");
  const double dist = mean_norm("dist");

  const bool ordering = conj < ddpg && conj < d4pg && conj < dist;
  const bool capped = ddpg <= 1.0 && d4pg <= 1.0 && dist <= 1.0;
  const bool d4pg_level = d4pg >= 0.7;
  const bool budget = dt <= 900.0;

  std::ostringstream os;
  os.precision(3);
  os << std::fixed << "normalized means: conjugate " << conj << ", ddpg " << ddpg << ", d4pg "
     << d4pg << ", dist " << dist << " (mmse = 1.0 anchor); runtime " << dt << " s";
  report(9, ordering && capped && d4pg_level && budget, os.str());
  std::filesystem::remove_all(cfg.out_dir);
}

// ---------------------------------------------------------------------------
// 10. Distributed protocol correctness.
void criterion_10() {
  bool ok = true;
  std::string why = "barrier holds; rows assemble in agent order; M=1 equals centralized DDPG";

  Coordinator coord(3);
  coord.submit_row(0, 0, {0.1, 0.2});
  coord.submit_row(0, 2, {0.5, 0.6});
  if (coord.try_assemble().has_value()) {
    ok = false;
    why = "barrier did not hold on a missing agent";
  }
  coord.submit_row(0, 1, {0.3, 0.4});
  const auto W = coord.try_assemble();
  if (!W.has_value() || (*W)(0, 0) != 0.1 || (*W)(1, 0) != 0.3 || (*W)(2, 1) != 0.6) {
    ok = false;
    why = "assembled matrix rows out of order";
  }
  try {
    Coordinator dup(2);
    dup.submit_row(0, 0, {0.5});
    dup.submit_row(0, 0, {0.5});
    ok = false;
    why = "duplicate row accepted";
  } catch (const ProtocolError&) {
  }

  {
    ScenarioConfig c = scenario_preset("small");
    c.M = 3;
    c.K = 2;
    c.seed = 31;
    DistHyper h;
    h.rounds = 1;
    h.agent.hidden = {8, 4};
    h.agent.batch = 4;
    h.agent.steps_per_episode = 8;
    h.agent.action_act = OutputActivation::kSigmoid;
    const DistResult r = dist_train(generate_scenario(c), h);
    if (r.curve.size() != 1) {
      ok = false;
      why = "round count mismatch";
    }
  }

  {
    ScenarioConfig c = scenario_preset("small");
    c.M = 1;
    c.K = 3;
    c.seed = 41;
    DdpgHyper agent;
    agent.hidden = {16, 8};
    agent.batch = 8;
    agent.steps_per_episode = 25;
    agent.episodes = 2;
    agent.action_act = OutputActivation::kFlatSoftmax;
    agent.seed = 7;

    UplinkEnv env(generate_scenario(c));
    const DdpgResult central = ddpg_train(env, agent);
    DistHyper h;
    h.agent = agent;
    h.rounds = 2;
    h.seed = 7;
    const DistResult dist = dist_train(generate_scenario(c), h);
    if (dist.agent_curves.size() != 1 ||
        dist.agent_curves[0].size() != central.curve.size()) {
      ok = false;
      why = "M=1 curves have different shapes";
    } else {
      for (size_t i = 0; i < central.curve.size(); ++i) {
        if (dist.agent_curves[0][i].reward != central.curve[i].reward) {
          ok = false;
          why = "M=1 rewards differ from centralized DDPG";
          break;
        }
      }
    }
  }
  report(10, ok, why);
}

// ---------------------------------------------------------------------------
// 11. Determinism: identical manifests reproduce byte-identical metrics.
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_11() {
  ExperimentConfig cfg;
  cfg.preset = "custom";
  cfg.scenario = scenario_preset("small");
  cfg.scenario.M = 6;
  cfg.scenario.K = 3;
  cfg.algos = {"conjugate", "mmse", "ddpg", "dist"};
  cfg.seeds = {4};
  cfg.episodes = 1;
  cfg.steps_per_episode = 120;
  cfg.actor_delay = 40;
  cfg.out_dir = "acceptance_det";

  const ExperimentOutcome a = run_experiment(cfg);
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back(a.summary_path, slurp(a.summary_path));
  files.emplace_back(a.manifest_path, slurp(a.manifest_path));
  for (const auto& [algo, runs] : a.per_algo) {
    for (const auto& r : runs) files.emplace_back(r.curve_path, slurp(r.curve_path));
  }

  const ExperimentOutcome b = run_experiment(cfg);
  (void)b;
  bool ok = true;
  for (const auto& [path, bytes] : files) {
    if (slurp(path) != bytes) ok = false;
  }
  std::ostringstream os;
  os << files.size() << " metrics files byte-identical across reruns";
  report(11, ok, os.str());
  std::filesystem::remove_all(cfg.out_dir);
}

}  // namespace

int main() {
  const auto t0 = clock_type::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("acceptance finished in %.1f s with %d failure(s)\n", seconds_since(t0), failures);
  return failures == 0 ? 0 : 1;
}
