#include <doctest.h>

#include <cmath>
#include <complex>

#include "cellfree/baselines.hpp"

using namespace cellfree;

namespace {

UplinkEnv env_for_seed(std::uint64_t seed) {
  ScenarioConfig c = scenario_preset("small");
  c.seed = seed;
  return UplinkEnv(generate_scenario(c));
}

Mat conjugate_of(const UplinkEnv& env) {
  const Mat& g2 = env.channel().est.Ghat2;
  Mat ghat_abs(g2.rows, g2.cols);
  for (size_t i = 0; i < g2.size(); ++i) ghat_abs.a[i] = std::sqrt(g2.a[i]);
  return conjugate_beamforming(ghat_abs);
}

}  // namespace

TEST_CASE("conjugate beamforming closed forms") {
  Mat g(1, 3);
  g(0, 0) = 0.4;
  g(0, 1) = 9.0;
  g(0, 2) = 1e-3;
  const Mat W = conjugate_beamforming(g);
  for (int k = 0; k < 3; ++k) CHECK(W(0, k) == 1.0);  // single eAP

  Mat col(2, 1);
  col(0, 0) = 2.0;
  col(1, 0) = 1.0;
  const Mat W2 = conjugate_beamforming(col);
  CHECK(W2(0, 0) == 1.0);
  CHECK(W2(1, 0) == 0.5);

  Mat scaled = col;
  for (double& v : scaled.a) v *= 17.0;
  CHECK(conjugate_beamforming(scaled).a == W2.a);  // scale invariance

  Mat zero(3, 1, 0.0);
  const Mat Wz = conjugate_beamforming(zero);
  for (double v : Wz.a) CHECK(v == 0.0);
}

TEST_CASE("mmse weights match a hand evaluation on a small instance") {
  // M=2, K=2 fixed instance: every term of the per-eAP combiner evaluated
  // with scalar arithmetic, independent of the implementation.
  LinkPowers lp;
  lp.M = 2;
  lp.K = 2;
  lp.D = Mat(2, 2);
  lp.D(0, 0) = 4.0;
  lp.D(0, 1) = 1.0;
  lp.D(1, 0) = 0.5;
  lp.D(1, 1) = 3.0;
  lp.contamV = Mat(2, 2, 0.25);
  lp.contamU = Mat(2, 2, 0.5);
  lp.gbar = lp.D;
  lp.noise_coef = {2.0, 1.5};
  lp.sic_order = {0, 1};  // UE 0 decoded first, sees UE 1 as interference

  const Mat W = mmse_beamforming(lp, 1.0);

  // UE 0 (earlier): interference from UE 1.
  const double v00 = std::sqrt(4.0) / (2.0 + 0.25 + 0.5 + 1.0);
  const double v10 = std::sqrt(0.5) / (1.5 + 0.25 + 0.5 + 3.0);
  const double peak0 = std::max(v00, v10);
  CHECK(W(0, 0) == doctest::Approx(v00 / peak0).epsilon(1e-9));
  CHECK(W(1, 0) == doctest::Approx(v10 / peak0).epsilon(1e-9));

  // UE 1 (last): no inter-UE interference, contamination and noise only.
  const double v01 = std::sqrt(1.0) / (2.0 + 0.25 + 0.5);
  const double v11 = std::sqrt(3.0) / (1.5 + 0.25 + 0.5);
  const double peak1 = std::max(v01, v11);
  CHECK(W(0, 1) == doctest::Approx(v01 / peak1).epsilon(1e-9));
  CHECK(W(1, 1) == doctest::Approx(v11 / peak1).epsilon(1e-9));
}

TEST_CASE("mmse leaves an all-zero column at zero") {
  LinkPowers lp;
  lp.M = 2;
  lp.K = 1;
  lp.D = Mat(2, 1, 0.0);
  lp.contamV = Mat(2, 1, 0.0);
  lp.contamU = Mat(2, 1, 0.0);
  lp.gbar = lp.D;
  lp.noise_coef = {1.0, 1.0};
  lp.sic_order = {0};
  const Mat W = mmse_beamforming(lp);
  for (double v : W.a) CHECK(v == 0.0);
}

TEST_CASE("baseline weights always satisfy the box constraint") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    UplinkEnv env = env_for_seed(seed);
    for (const Mat& W : {conjugate_of(env), mmse_beamforming(env.estimated_link_powers())}) {
      for (double w : W.a) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
      }
    }
  }
}

TEST_CASE("mmse outperforms conjugate on most seeded blocks") {
  int wins = 0;
  const int blocks = 100;
  for (int seed = 0; seed < blocks; ++seed) {
    UplinkEnv env = env_for_seed(1000 + seed);
    const double r_mmse = sum_rate(env.gamma_of(mmse_beamforming(env.estimated_link_powers())));
    const double r_conj = sum_rate(env.gamma_of(conjugate_of(env)));
    if (r_mmse >= r_conj) ++wins;
  }
  CHECK(wins >= 90);
}

TEST_CASE("gradient ascent identities") {
  UplinkEnv env = env_for_seed(17);
  env.reset();
  Mat W0(env.M(), env.K(), 0.5);

  GradientAscentOptions no_iters;
  no_iters.iters = 0;
  CHECK(gradient_ascent(env, W0, no_iters).W.a == W0.a);

  GradientAscentOptions zero_lr;
  zero_lr.lr = 0.0;
  zero_lr.iters = 5;
  CHECK(gradient_ascent(env, W0, zero_lr).W.a == W0.a);
}

TEST_CASE("accepted rewards are non-decreasing and improve on most blocks") {
  int improved = 0;
  const int blocks = 20;
  for (int seed = 0; seed < blocks; ++seed) {
    UplinkEnv env = env_for_seed(2000 + seed);
    env.reset();
    const Mat W0 = ordered_anchor(env.estimated_link_powers().sic_order, env.M());
    GradientAscentOptions opt;
    opt.iters = 40;
    const GradientAscentResult res = gradient_ascent(env, W0, opt);
    if (res.best_reward > env.reward_of(W0)) ++improved;
    for (size_t i = 1; i < res.accepted_rewards.size(); ++i) {
      CHECK(res.accepted_rewards[i] >= res.accepted_rewards[i - 1]);
    }
  }
  CHECK(improved >= static_cast<int>(0.95 * blocks));
}

TEST_CASE("single-link reward is scale-free, so any weight is optimal") {
  // With one eAP and one UE the SINR is invariant to the combining weight
  // (signal and the weighted noise normalization scale together), so the
  // ascent cannot do better than the boundary value w = 1.
  ScenarioConfig c = scenario_preset("small");
  c.M = 1;
  c.K = 1;
  c.seed = 4;
  UplinkEnv env(generate_scenario(c));
  env.reset();
  Mat ones(1, 1, 1.0);
  Mat half(1, 1, 0.5);
  CHECK(env.reward_of(half) == doctest::Approx(env.reward_of(ones)).epsilon(1e-12));
  GradientAscentOptions opt;
  opt.iters = 20;
  const GradientAscentResult res = gradient_ascent(env, half, opt);
  CHECK(res.best_reward == doctest::Approx(env.reward_of(ones)).epsilon(1e-9));
}

TEST_CASE("estimate-based warm start is feasible and beats the flat anchor") {
  int feasible = 0;
  int at_least_anchor = 0;
  const int blocks = 10;
  for (int seed = 0; seed < blocks; ++seed) {
    UplinkEnv env = env_for_seed(3000 + seed);
    const LinkPowers lp_est = env.estimated_link_powers();
    const Mat W = estimate_based_warm_start(
        lp_est, env.scenario().config.sic_sensitivity_linear(), 3e-4);
    for (double w : W.a) {
      CHECK(w >= 0.0);
      CHECK(w <= 1.0);
    }
    if (env.feasible_of(W)) ++feasible;
    const double anchor_reward = env.reward_of(ordered_anchor(lp_est.sic_order, env.M()));
    if (env.reward_of(W) >= anchor_reward - 1e-9) ++at_least_anchor;
  }
  CHECK(feasible >= 9);
  CHECK(at_least_anchor >= 9);
}
