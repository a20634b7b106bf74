#include "cellfree/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "cellfree/errors.hpp"

namespace cellfree {

Mat conjugate_beamforming(const Mat& ghat_abs) {
  const int M = ghat_abs.rows, K = ghat_abs.cols;
  Mat W(M, K);
  for (int k = 0; k < K; ++k) {
    double peak = 0.0;
    for (int m = 0; m < M; ++m) peak = std::max(peak, std::abs(ghat_abs(m, k)));
    if (peak == 0.0) continue;  // degenerate column, left at zero
    for (int m = 0; m < M; ++m) W(m, k) = std::abs(ghat_abs(m, k)) / peak;
  }
  return W;
}

Mat mmse_beamforming(const LinkPowers& lp_est, double noise_scale) {
  if (noise_scale <= 0.0) throw ConfigError("mmse: noise_scale must be > 0");
  const int M = lp_est.M, K = lp_est.K;

  std::vector<int> pos(K);
  for (int i = 0; i < K; ++i) pos[lp_est.sic_order[i]] = i;

  Mat W(M, K);
  for (int k = 0; k < K; ++k) {
    std::vector<double> v(M);
    for (int m = 0; m < M; ++m) {
      double den = noise_scale * lp_est.noise_coef[m] + lp_est.contamV(m, k) +
                   lp_est.contamU(m, k);
      for (int l = 0; l < K; ++l) {
        if (pos[l] > pos[k]) den += lp_est.D(m, l);
      }
      v[m] = std::sqrt(lp_est.D(m, k)) / den;
    }
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    if (peak == 0.0) continue;  // degenerate column, left at zero
    for (int m = 0; m < M; ++m) W(m, k) = v[m] / peak;
  }
  return W;
}

Mat ordered_anchor(const std::vector<int>& sic_order, int M, double decay, double level) {
  const int K = static_cast<int>(sic_order.size());
  Mat W(M, K);
  for (int i = 0; i < K; ++i) {
    const double s = level * std::pow(decay, i);
    for (int m = 0; m < M; ++m) W(m, sic_order[i]) = s;
  }
  return W;
}

GradientAscentResult gradient_ascent(const UplinkEnv& env, const Mat& W0,
                                     const GradientAscentOptions& opt) {
  return gradient_ascent_on(env.channel().lp, env.scenario().config.sic_sensitivity_linear(),
                            env.options().lambda_penalty, W0, opt);
}

Mat estimate_based_warm_start(const LinkPowers& lp_est, double sensitivity, double noise_sigma,
                              double safety, int iters) {
  const int M = lp_est.M, K = lp_est.K;
  const double headroom = safety / 100.0;  // safety given in percent
  std::vector<int> pos(K);
  for (int i = 0; i < K; ++i) pos[lp_est.sic_order[i]] = i;

  auto est_reward = [&](const Mat& W) {
    if (!check_sic_constraints(W, lp_est, sensitivity, headroom).feasible()) return -1.0;
    return sum_rate(compute_sinr(W, lp_est));
  };

  // Candidate family 1: flat directions with decaying column scales.
  std::vector<Mat> candidates;
  for (double decay : {0.3, 0.45, 0.55}) {
    candidates.push_back(ordered_anchor(lp_est.sic_order, M, decay));
  }

  // Candidate family 2: soft-selection directions (signal over decoding-
  // stage interference-plus-noise, sharpened by q) with decaying column
  // scales and a pointwise chain: every earlier-decoded column dominates
  // the next one by the chain factor at every eAP, which keeps every SIC
  // margin open with fixed relative slack no matter what the gains are.
  Mat ratios(M, K);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      double den = lp_est.noise_coef[m] + lp_est.contamV(m, k) + lp_est.contamU(m, k);
      for (int l = 0; l < K; ++l) {
        if (pos[l] > pos[k]) den += lp_est.D(m, l);
      }
      ratios(m, k) = lp_est.D(m, k) / den;
    }
  }
  for (double q : {1.0, 2.0, 4.0, 8.0}) {
    for (double decay : {0.2, 0.25, 0.3, 0.35, 0.45}) {
      for (double chain : {1.3, 1.5, 2.0}) {
        Mat W(M, K);
        for (int k = 0; k < K; ++k) {
          double peak = 0.0;
          for (int m = 0; m < M; ++m) peak = std::max(peak, ratios(m, k));
          const double s = 0.9 * std::pow(decay, pos[k]);
          for (int m = 0; m < M; ++m) {
            W(m, k) = peak > 0.0 ? s * std::pow(ratios(m, k) / peak, q) : s;
          }
        }
        for (int i = K - 2; i >= 0; --i) {
          const int cur = lp_est.sic_order[i];
          const int next = lp_est.sic_order[i + 1];
          for (int m = 0; m < M; ++m) {
            W(m, cur) = std::clamp(std::max(W(m, cur), chain * W(m, next)), 0.0, 1.0);
          }
        }
        candidates.push_back(std::move(W));
      }
    }
  }

  // Noise-robust score: the learners explore with clamped Gaussian action
  // noise, so a candidate is only as good as its noisy neighborhood.
  auto noisy_score = [&](const Mat& W) {
    if (noise_sigma <= 0.0) return est_reward(W);
    Rng rng(0x77617273ULL);  // fixed stream, deterministic scoring
    constexpr int kDraws = 16;
    double acc = 0.0;
    for (int d = 0; d < kDraws; ++d) {
      Mat Wn = W;
      for (double& w : Wn.a) w = std::clamp(w + noise_sigma * rng.normal(), 0.0, 1.0);
      acc += est_reward(Wn);
    }
    return acc / kDraws;
  };

  Mat best_candidate = candidates.front();
  double best = noisy_score(best_candidate);
  for (size_t i = 1; i < candidates.size(); ++i) {
    const double r = noisy_score(candidates[i]);
    if (r > best) {
      best = r;
      best_candidate = candidates[i];
    }
  }

  // Refine in chunks and keep the noisiest-scored point along the path;
  // the ascent trades margin slack for rate, so the endpoint is not
  // necessarily the best point to explore around.
  GradientAscentOptions opt;
  opt.iters = std::max(1, iters / 4);
  opt.relative_headroom = headroom;
  Mat best_point = best_candidate;
  double best_score = noisy_score(best_point);
  Mat walker = best_candidate;
  for (int chunk = 0; chunk < 4; ++chunk) {
    walker = gradient_ascent_on(lp_est, sensitivity, 1.0, walker, opt).W;
    const double score = noisy_score(walker);
    if (score > best_score) {
      best_score = score;
      best_point = walker;
    }
  }

  // Randomized polish directly on the noise-robust score: multiplicative
  // jitter of one column, one row, or the whole matrix, keeping improvements.
  Rng polish_rng(0x706f6cULL);
  for (int trial = 0; trial < 1500; ++trial) {
    Mat trial_W = best_point;
    switch (trial % 3) {
      case 0: {
        const int k = static_cast<int>(polish_rng.uniform() * K);
        const double spread = 0.1 + 0.4 * polish_rng.uniform();
        for (int m = 0; m < M; ++m) {
          trial_W(m, k) =
              std::clamp(trial_W(m, k) * std::exp(spread * polish_rng.normal()), 0.0, 1.0);
        }
        break;
      }
      case 1:
        for (double& w : trial_W.a) {
          w = std::clamp(w * std::exp(0.1 * polish_rng.normal()), 0.0, 1.0);
        }
        break;
      default: {
        const int m = static_cast<int>(polish_rng.uniform() * M);
        for (int k = 0; k < K; ++k) {
          trial_W(m, k) =
              std::clamp(trial_W(m, k) * std::exp(0.3 * polish_rng.normal()), 0.0, 1.0);
        }
        break;
      }
    }
    const double score = noisy_score(trial_W);
    if (score > best_score) {
      best_score = score;
      best_point = std::move(trial_W);
    }
  }
  return best_point;
}

GradientAscentResult gradient_ascent_on(const LinkPowers& lp, double sensitivity, double penalty,
                                        const Mat& W0, const GradientAscentOptions& opt) {
  if (opt.lr < 0.0) throw ConfigError("gradient_ascent: lr must be >= 0");

  auto rate_of = [&lp](const Mat& W) { return sum_rate(compute_sinr(W, lp)); };
  auto feasible = [&lp, sensitivity, &opt](const Mat& W) {
    return check_sic_constraints(W, lp, sensitivity, opt.relative_headroom).feasible();
  };
  auto reward_of = [&](const Mat& W) { return feasible(W) ? rate_of(W) : -penalty; };

  GradientAscentResult res;
  res.W = W0;
  res.best_reward = reward_of(W0);
  if (feasible(W0)) res.accepted_rewards.push_back(res.best_reward);

  Mat W = W0;
  double current = res.best_reward;
  const double h = opt.fd_step;
  for (int it = 0; it < opt.iters; ++it) {
    Mat grad(W.rows, W.cols);
    for (size_t i = 0; i < W.size(); ++i) {
      Mat Wp = W, Wm = W;
      Wp.a[i] = std::min(1.0, W.a[i] + h);
      Wm.a[i] = std::max(0.0, W.a[i] - h);
      const double span = Wp.a[i] - Wm.a[i];
      grad.a[i] = span > 0.0 ? (rate_of(Wp) - rate_of(Wm)) / span : 0.0;
    }
    // Backtracking: halve the step until the (feasibility-aware) reward
    // improves, so the iterate never walks off a feasible ridge it found.
    // When the joint step fails everywhere, retry restricted to single
    // columns: one UE's combiner can often move where the joint move
    // breaks a SIC margin between others.
    auto try_direction = [&](int column) {
      double step = opt.lr;
      for (int bt = 0; bt <= opt.backtracks; ++bt, step *= 0.5) {
        Mat Wtry = W;
        for (int m = 0; m < W.rows; ++m) {
          for (int k = 0; k < W.cols; ++k) {
            if (column >= 0 && k != column) continue;
            const size_t i = static_cast<size_t>(m) * W.cols + k;
            if (opt.multiplicative) {
              Wtry.a[i] = std::clamp(W.a[i] * std::exp(step * W.a[i] * grad.a[i]), 0.0, 1.0);
            } else {
              Wtry.a[i] = std::clamp(W.a[i] + step * grad.a[i], 0.0, 1.0);
            }
          }
        }
        const double reward = reward_of(Wtry);
        if (reward > current) {
          W = std::move(Wtry);
          current = reward;
          return true;
        }
      }
      return false;
    };
    bool moved = try_direction(-1);
    for (int k = 0; !moved && k < W.cols; ++k) {
      moved = try_direction((it + k) % W.cols);
    }
    if (!moved) break;  // nothing improves at the smallest scale
    if (feasible(W) && current > res.best_reward) {
      res.W = W;
      res.best_reward = current;
      res.accepted_rewards.push_back(current);
    }
  }
  return res;
}

}  // namespace cellfree
