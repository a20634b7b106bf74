#pragma once

#include "cellfree/env.hpp"
#include "cellfree/mat.hpp"

namespace cellfree {

/// Matched-filter weights: each column is |ghat| normalized by its largest
/// entry, so the strongest eAP per UE gets weight one. An all-zero column
/// stays zero.
Mat conjugate_beamforming(const Mat& ghat_abs);

/// Per-UE MMSE receive combiner on the estimated channel statistics. Under
/// this model the interference seen by different eAPs is uncorrelated (the
/// small-scale phases are independent), so the interference-plus-noise
/// covariance is diagonal and the combiner reduces to per-eAP scalar
/// weights: amplitude over the interference-plus-noise power each eAP
/// actually contributes to UE k's decoding stage,
///
///   v_mk = sqrt(D_mk) / (sum_{l after k} D_ml + contamination_mk
///                        + noise_scale * n_m),
///
/// then magnitudes normalized per column into [0, 1]. lp_est must be built
/// from estimated gains; the decoding stage comes from its SIC order.
Mat mmse_beamforming(const LinkPowers& lp_est, double noise_scale = 1.0);

/// Conservative decode-order-respecting anchor: flat directions whose
/// column scales decay geometrically along the SIC order. Strictly
/// feasible on typical blocks; used as a warm start for the optimizers.
Mat ordered_anchor(const std::vector<int>& sic_order, int M, double decay = 0.55,
                   double level = 0.5);

struct GradientAscentOptions {
  double lr = 0.1;
  int iters = 100;
  double fd_step = 1e-4;  // central-difference step
  int backtracks = 12;    // step halvings when the reward does not improve
  // Exponentiated update (ascent on log-weights). The additive update's
  // largest gradient components sit on the smallest entries and point in
  // the order-restoring direction every SIC condition forbids, so it
  // cannot leave the starting point; the multiplicative geometry reshapes
  // directions at fixed column scales instead.
  bool multiplicative = true;
  // Extra SIC margin demanded as a fraction of each condition's positive
  // part; nonzero when ascending on estimated gains.
  double relative_headroom = 0.0;
};

struct GradientAscentResult {
  Mat W;                 // best feasible iterate (or W0 if none improved)
  double best_reward = 0.0;
  std::vector<double> accepted_rewards;  // non-decreasing by construction
};

/// Projected gradient ascent on the environment reward: finite-difference
/// gradients of the sum-rate, an element-wise clamp to [0, 1] as the
/// projection, tracking the best feasible iterate seen.
GradientAscentResult gradient_ascent(const UplinkEnv& env, const Mat& W0,
                                     const GradientAscentOptions& opt = {});

/// Same ascent against an explicit link-power model (reward = sum-rate when
/// every SIC margin clears `sensitivity`, else -penalty). Lets receiver-side
/// code optimize on estimated gains.
GradientAscentResult gradient_ascent_on(const LinkPowers& lp, double sensitivity, double penalty,
                                        const Mat& W0, const GradientAscentOptions& opt = {});

/// Receiver-side warm start: picks the best of several decode-order
///-respecting constructions on the estimated link powers and refines it by
/// exponentiated ascent. Candidates are scored by their mean estimated
/// reward under Gaussian action noise of scale noise_sigma, so the returned
/// point survives the exploration the learners add on top; relative margin
/// headroom absorbs estimate/true discrepancies.
Mat estimate_based_warm_start(const LinkPowers& lp_est, double sensitivity,
                              double noise_sigma = 0.002, double safety = 10.0,
                              int iters = 300);

}  // namespace cellfree
