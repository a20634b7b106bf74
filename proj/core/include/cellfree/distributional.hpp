#pragma once

#include <vector>

#include "cellfree/nn.hpp"

namespace cellfree {

/// Fixed categorical support: num_atoms evenly spaced values on
/// [v_min, v_max].
struct DistributionSupport {
  int num_atoms = 51;
  double v_min = -20.0;
  double v_max = 100.0;

  double spacing() const { return (v_max - v_min) / (num_atoms - 1); }
  std::vector<double> atoms() const;
  void validate() const;  // throws ConfigError
};

/// Probabilities over the support atoms; non-negative, sums to one.
using ValueDistribution = std::vector<double>;

double distribution_mean(const ValueDistribution& probs, const DistributionSupport& support);

/// Maps mass sitting at shifted_atoms[j] back onto the support: each value
/// is clamped into [v_min, v_max] and split linearly between its two
/// neighboring atoms. Mass is conserved exactly.
ValueDistribution categorical_projection(const ValueDistribution& probs,
                                         const std::vector<double>& shifted_atoms,
                                         const DistributionSupport& support);

/// Projected N-step target from an explicit reward window and bootstrap
/// distribution: project(sum_n zeta^n r_n + zeta^N * z_j with mass
/// bootstrap[j]).
ValueDistribution project_nstep(const std::vector<double>& rewards, double zeta,
                                const ValueDistribution& bootstrap,
                                const DistributionSupport& support);

}  // namespace cellfree
