#include "cellfree/fading.hpp"

#include <cmath>

#include "cellfree/errors.hpp"

namespace cellfree {

Mat sample_large_scale(const Scenario& scenario, Rng& rng) {
  const ScenarioConfig& c = scenario.config;
  const int M = c.M, K = c.K;

  std::vector<double> a(M), b(K);
  for (int m = 0; m < M; ++m) a[m] = rng.normal();
  for (int k = 0; k < K; ++k) b[k] = rng.normal();

  const double wa = std::sqrt(c.delta);
  const double wb = std::sqrt(1.0 - c.delta);

  Mat F(M, K);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const double z = wa * a[m] + wb * b[k];
      const double path = std::pow(scenario.distances(m, k), -2.0 * c.kappa);
      F(m, k) = path * std::pow(10.0, c.sigma_sh_db * z / 10.0);
    }
  }
  return F;
}

Mat sample_small_scale(int M, int K, double nakagami_m, double nakagami_omega, Rng& rng) {
  if (nakagami_m < 0.5) throw ConfigError("nakagami_m must be >= 0.5");
  if (nakagami_omega <= 0.0) throw ConfigError("nakagami_omega must be > 0");
  const double shape = nakagami_m;
  const double scale = nakagami_omega / nakagami_m;  // 1 / rate
  Mat H2(M, K);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) H2(m, k) = rng.gamma(shape, scale);
  }
  return H2;
}

Mat compose_gains(const Mat& F, const Mat& H2) {
  if (!F.same_shape(H2)) throw DimensionError("compose_gains: shape mismatch");
  Mat G2(F.rows, F.cols);
  for (size_t i = 0; i < F.size(); ++i) G2.a[i] = F.a[i] * H2.a[i];
  return G2;
}

FadingBlock sample_fading_block(const Scenario& scenario, Rng& rng) {
  FadingBlock block;
  block.F = sample_large_scale(scenario, rng);
  block.H2 = sample_small_scale(scenario.config.M, scenario.config.K, scenario.config.nakagami_m,
                                scenario.config.nakagami_omega, rng);
  block.G2 = compose_gains(block.F, block.H2);
  return block;
}

}  // namespace cellfree
