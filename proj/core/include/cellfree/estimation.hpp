#pragma once

#include "cellfree/fading.hpp"
#include "cellfree/mat.hpp"
#include "cellfree/pilot.hpp"
#include "cellfree/rng.hpp"

namespace cellfree {

/// Per-link channel estimate for one coherence block.
///
/// E holds the MMSE estimation constants; Ydot the per-(eAP, UE) projected
/// pilot observations; Ghat = E .* Ydot the gain estimates. Gtrue keeps the
/// complex realization of the true gains so that downstream consumers (the
/// SIC feasibility check) see the exact same draw the pilots saw.
struct EstimationResult {
  Mat E;        // M x K estimation constants
  CMat Ydot;    // M x K projected observations
  CMat Ghat;    // M x K estimated complex gains
  Mat Ghat2;    // |Ghat|^2
  CMat Gtrue;   // M x K true complex gains (|Gtrue|^2 == block.G2)
};

/// MMSE estimation constants:
///
///   E_mk = sqrt(tau_p * rho_k) * F_mk * (alpha/beta)
///          / (tau_p * sum_l rho_l * F_ml * (alpha/beta) * |phi_k^H phi_l|^2 + 1)
///
/// Deterministic in its inputs; no RNG is involved.
Mat estimation_constants(const Mat& F, const PilotPlan& pilots, double gamma_shape,
                         double gamma_rate);

/// Runs one pilot phase: attaches i.i.d. uniform phases to the block's
/// amplitude gains, forms the received pilot vector per eAP with unit-power
/// complex AWGN (variance 1/2 per real dimension), projects onto each UE's
/// pilot, and scales by the estimation constants. noise_scale multiplies the
/// pilot noise standard deviation (0 gives the noiseless limit).
EstimationResult estimate_gains(const FadingBlock& block, const PilotPlan& pilots,
                                double gamma_shape, double gamma_rate, Rng& rng,
                                double noise_scale = 1.0);

}  // namespace cellfree
