#pragma once

#include "cellfree/mat.hpp"
#include "cellfree/rng.hpp"
#include "cellfree/scenario.hpp"

namespace cellfree {

/// One coherence block of channel power gains, all in linear scale.
struct FadingBlock {
  Mat F;   // large-scale factors
  Mat H2;  // small-scale power gains |h|^2
  Mat G2;  // composite |g|^2 = F .* H2
};

/// Large-scale fading: F_mk = L_mk^(-2*kappa) * 10^(sigma_sh * z_mk / 10)
/// with z_mk = sqrt(delta) * a_m + sqrt(1-delta) * b_k. The a draw is shared
/// by all links of one eAP and the b draw by all links of one UE, which is
/// what makes delta a transmitter-receiver correlation knob; each z_mk is
/// still standard normal marginally.
Mat sample_large_scale(const Scenario& scenario, Rng& rng);

/// Small-scale power gains: |h|^2 i.i.d. Gamma(shape = m, rate = m / omega),
/// i.e. a Nakagami-m envelope.
Mat sample_small_scale(int M, int K, double nakagami_m, double nakagami_omega, Rng& rng);

/// Element-wise product of F and H2.
Mat compose_gains(const Mat& F, const Mat& H2);

/// Samples a full block from the scenario's physical parameters.
FadingBlock sample_fading_block(const Scenario& scenario, Rng& rng);

}  // namespace cellfree
