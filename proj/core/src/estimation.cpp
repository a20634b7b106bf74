#include "cellfree/estimation.hpp"

#include <cmath>

#include "cellfree/errors.hpp"

namespace cellfree {

Mat estimation_constants(const Mat& F, const PilotPlan& pilots, double gamma_shape,
                         double gamma_rate) {
  const int M = F.rows, K = F.cols;
  if (static_cast<int>(pilots.config.rho.size()) != K) {
    throw DimensionError("estimation_constants: rho length != K");
  }
  const double mean_h2 = gamma_shape / gamma_rate;  // E|h|^2 = alpha / beta
  const double tau_p = pilots.config.tau_p;
  const Mat X = pilots.matrix.cross_gram();

  Mat E(M, K);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      double denom = 1.0;
      for (int l = 0; l < K; ++l) {
        denom += tau_p * pilots.config.rho[l] * F(m, l) * mean_h2 * X(k, l);
      }
      E(m, k) = std::sqrt(tau_p * pilots.config.rho[k]) * F(m, k) * mean_h2 / denom;
    }
  }
  return E;
}

EstimationResult estimate_gains(const FadingBlock& block, const PilotPlan& pilots,
                                double gamma_shape, double gamma_rate, Rng& rng,
                                double noise_scale) {
  const int M = block.G2.rows, K = block.G2.cols;
  const int tau_p = pilots.config.tau_p;
  const CMat& phi = pilots.matrix.phi;

  EstimationResult res;
  res.E = estimation_constants(block.F, pilots, gamma_shape, gamma_rate);
  res.Gtrue = CMat(M, K);
  res.Ydot = CMat(M, K);
  res.Ghat = CMat(M, K);
  res.Ghat2 = Mat(M, K);

  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const double amp = std::sqrt(block.G2(m, k));
      const double th = rng.phase();
      res.Gtrue(m, k) = {amp * std::cos(th), amp * std::sin(th)};
    }
  }

  std::vector<std::complex<double>> y(tau_p);
  for (int m = 0; m < M; ++m) {
    for (int t = 0; t < tau_p; ++t) y[t] = noise_scale * rng.cnormal(1.0);
    for (int l = 0; l < K; ++l) {
      const std::complex<double> scaled =
          std::sqrt(tau_p * pilots.config.rho[l]) * res.Gtrue(m, l);
      for (int t = 0; t < tau_p; ++t) y[t] += scaled * phi(t, l);
    }
    for (int k = 0; k < K; ++k) {
      std::complex<double> proj = 0.0;
      for (int t = 0; t < tau_p; ++t) proj += std::conj(phi(t, k)) * y[t];
      res.Ydot(m, k) = proj;
      res.Ghat(m, k) = res.E(m, k) * proj;
      res.Ghat2(m, k) = std::norm(res.Ghat(m, k));
    }
  }
  return res;
}

}  // namespace cellfree
