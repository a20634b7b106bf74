#include "cellfree/pilot.hpp"

#include "cellfree/errors.hpp"

namespace cellfree {

void PilotConfig::validate() const {
  if (tau_p < 1) throw ConfigError("tau_p must be >= 1");
  if (rho.size() != assignment.size()) throw ConfigError("rho/assignment length mismatch");
  for (double r : rho) {
    if (r <= 0.0) throw ConfigError("pilot powers must be > 0");
  }
  for (int a : assignment) {
    if (a < 0 || a >= tau_p) throw ConfigError("pilot assignment out of range");
  }
}

Mat PilotMatrix::cross_gram() const {
  const int K = phi.cols;
  Mat X(K, K);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      std::complex<double> dot = 0.0;
      for (int t = 0; t < phi.rows; ++t) dot += std::conj(phi(t, k)) * phi(t, l);
      X(k, l) = std::norm(dot);
    }
  }
  return X;
}

PilotPlan build_pilots(int K, int tau_p, double rho_normalized) {
  if (tau_p < 1) throw ConfigError("tau_p must be >= 1");
  if (K < 1) throw ConfigError("K must be >= 1");

  PilotPlan plan;
  plan.config.tau_p = tau_p;
  plan.config.rho.assign(K, rho_normalized);
  plan.config.assignment.resize(K);
  plan.matrix.phi = CMat(tau_p, K);
  for (int k = 0; k < K; ++k) {
    const int idx = k % tau_p;
    plan.config.assignment[k] = idx;
    plan.matrix.phi(idx, k) = 1.0;
  }
  plan.config.validate();
  return plan;
}

}  // namespace cellfree
