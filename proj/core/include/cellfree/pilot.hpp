#pragma once

#include <vector>

#include "cellfree/mat.hpp"

namespace cellfree {

/// Pilot plan: sequence length, per-UE normalized powers, and which pilot
/// index each UE transmits.
struct PilotConfig {
  int tau_p = 1;
  std::vector<double> rho;     // length K, normalized (power / noise)
  std::vector<int> assignment;  // length K, pilot index in [0, tau_p)

  void validate() const;
};

/// tau_p x K matrix whose k-th column is UE k's unit-norm pilot.
struct PilotMatrix {
  CMat phi;

  /// |phi_k^H phi_l|^2 for all UE pairs.
  Mat cross_gram() const;
};

struct PilotPlan {
  PilotConfig config;
  PilotMatrix matrix;
};

/// Assigns pilots from the canonical orthonormal basis of dimension tau_p.
/// When tau_p < K the pilots are reused round-robin, so UEs k and k+tau_p
/// share one (contamination); when tau_p >= K the set is fully orthogonal.
PilotPlan build_pilots(int K, int tau_p, double rho_normalized);

}  // namespace cellfree
