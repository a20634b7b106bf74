#include "cellfree/distributional.hpp"

#include <algorithm>
#include <cmath>

#include "cellfree/errors.hpp"

namespace cellfree {

void DistributionSupport::validate() const {
  if (num_atoms < 2) throw ConfigError("support needs at least two atoms");
  if (!(v_min < v_max)) throw ConfigError("support needs v_min < v_max");
}

std::vector<double> DistributionSupport::atoms() const {
  std::vector<double> z(num_atoms);
  const double d = spacing();
  for (int i = 0; i < num_atoms; ++i) z[i] = v_min + d * i;
  return z;
}

double distribution_mean(const ValueDistribution& probs, const DistributionSupport& support) {
  double mean = 0.0;
  const double d = support.spacing();
  for (size_t i = 0; i < probs.size(); ++i) mean += probs[i] * (support.v_min + d * i);
  return mean;
}

ValueDistribution categorical_projection(const ValueDistribution& probs,
                                         const std::vector<double>& shifted_atoms,
                                         const DistributionSupport& support) {
  if (probs.size() != shifted_atoms.size()) {
    throw DimensionError("categorical_projection: probs/atoms length mismatch");
  }
  const double d = support.spacing();
  ValueDistribution out(support.num_atoms, 0.0);
  for (size_t j = 0; j < probs.size(); ++j) {
    const double mass = probs[j];
    if (mass == 0.0) continue;
    const double t = std::clamp(shifted_atoms[j], support.v_min, support.v_max);
    const double pos = (t - support.v_min) / d;
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, support.num_atoms - 1);
    if (lo == hi) {
      out[lo] += mass;
    } else {
      out[lo] += mass * (hi - pos);
      out[hi] += mass * (pos - lo);
    }
  }
  return out;
}

ValueDistribution project_nstep(const std::vector<double>& rewards, double zeta,
                                const ValueDistribution& bootstrap,
                                const DistributionSupport& support) {
  double prefix = 0.0;
  double disc = 1.0;
  for (double r : rewards) {
    prefix += disc * r;
    disc *= zeta;  // ends at zeta^N
  }
  std::vector<double> shifted = support.atoms();
  for (double& z : shifted) z = prefix + disc * z;
  return categorical_projection(bootstrap, shifted, support);
}

}  // namespace cellfree
