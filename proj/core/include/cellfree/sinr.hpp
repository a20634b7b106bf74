#pragma once

#include <vector>

#include "cellfree/estimation.hpp"
#include "cellfree/fading.hpp"
#include "cellfree/mat.hpp"
#include "cellfree/pilot.hpp"

namespace cellfree {

/// Data-plane power setup for the SIC receiver.
struct SicConfig {
  std::vector<double> p;     // per-UE data powers, normalized (power / noise)
  double sensitivity = 1.0;  // successful-SIC margin P_s, linear
};

/// Instantaneous per-link power terms of the received-signal decomposition,
/// evaluated from one block's sampled gains. All interference encountered by
/// UE k's combiner is expressible from these:
///
///   D[m][k]        tau_p * rho_k * p_k * E_mk^2 * |g_mk|^2, the desired-scale
///                  power of UE k at eAP m (and UE k's footprint in any other
///                  UE's combiner),
///   contamV[m][k]  pilot contamination folded onto UE k's own symbol,
///   contamU[m][k]  cross contamination among the other UEs' symbols,
///   noise_coef[m]  AWGN-related estimation error plus receiver AWGN per unit
///                  combining weight; dividing by its weighted sum normalizes
///                  the SINR denominator's noise term to one,
///   gbar[m][k]     p_k * |g_mk|^2 with the true gains, feeding the SIC
///                  feasibility conditions only.
///
/// With fully orthogonal pilots both contamination matrices are identically
/// zero. sic_order holds the decoding permutation (ascending column sums of
/// D, ties by UE index).
struct LinkPowers {
  int M = 0;
  int K = 0;
  Mat D;
  Mat contamV;
  Mat contamU;
  std::vector<double> noise_coef;
  Mat gbar;
  std::vector<int> sic_order;  // position -> original UE index
};

/// order_override, when given, fixes the decode order instead of sorting on
/// the block's own effective powers (the receiver orders on what it can
/// measure; physics may disagree near ties).
LinkPowers build_link_powers(const FadingBlock& block, const EstimationResult& est,
                             const PilotPlan& pilots, const SicConfig& sic,
                             const std::vector<int>* order_override = nullptr);

/// Ascending-order permutation of UEs by total effective received power
/// (column sums of the effective-gain matrix); ties broken by UE index.
std::vector<int> sic_order(const Mat& effective_gains);

enum class InterferenceMode {
  kSicOrdered,      // interference from UEs decoded later in the order
  kAllInterferers,  // interference from every other UE
};

/// Per-UE SINR (indexed by original UE) for beamforming matrix W, entries
/// in [0, 1]. A zero column yields zero SINR.
std::vector<double> compute_sinr(const Mat& W, const LinkPowers& lp,
                                 InterferenceMode mode = InterferenceMode::kSicOrdered);

/// sum_k log2(1 + gamma_k), bits/s/Hz.
double sum_rate(const std::vector<double>& gamma);

struct SicViolation {
  int l = 0;      // 1-based position in SIC order, 2..K
  int delta = 0;  // 1-based position in SIC order, 1..l-1
  double margin = 0.0;  // lhs - sensitivity, negative when violated
};

struct SicCheck {
  int conditions_checked = 0;  // always K*(K-1)/2
  std::vector<SicViolation> violations;

  bool feasible() const { return violations.empty(); }
};

/// Evaluates every successful-SIC condition
///   sum_m (w_{m,delta}^2 - sum_{i=delta+1..l} w_{m,i}^2) * gbar_{m,l} >= P_s
/// over SIC-ordered indices, and reports the violated ones. A positive
/// relative_headroom additionally demands that fraction of the condition's
/// positive part as margin (used when checking on estimated gains).
SicCheck check_sic_constraints(const Mat& W, const LinkPowers& lp, double sensitivity,
                               double relative_headroom = 0.0);

}  // namespace cellfree
