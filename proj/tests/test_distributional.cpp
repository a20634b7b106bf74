#include <doctest.h>

#include <cmath>

#include "cellfree/distributional.hpp"
#include "cellfree/errors.hpp"
#include "cellfree/rng.hpp"

using namespace cellfree;

TEST_CASE("projection onto unshifted atoms is the identity") {
  DistributionSupport support{5, 0.0, 4.0};
  ValueDistribution probs = {0.1, 0.2, 0.3, 0.25, 0.15};
  const ValueDistribution out = categorical_projection(probs, support.atoms(), support);
  for (int i = 0; i < 5; ++i) CHECK(out[i] == doctest::Approx(probs[i]).epsilon(1e-12));
}

TEST_CASE("mass below the support clamps onto the first atom") {
  DistributionSupport support{4, 0.0, 3.0};
  ValueDistribution probs = {0.25, 0.25, 0.25, 0.25};
  std::vector<double> shifted = {-10.0, -5.0, -1.0, -0.1};
  const ValueDistribution out = categorical_projection(probs, shifted, support);
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear interpolation splits mass between neighbors") {
  DistributionSupport support{3, 0.0, 2.0};
  ValueDistribution probs = {1.0, 0.0, 0.0};
  std::vector<double> shifted = {0.25, 0.0, 0.0};
  const ValueDistribution out = categorical_projection(probs, shifted, support);
  CHECK(out[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection conserves mass on random shifts") {
  DistributionSupport support{51, -20.0, 100.0};
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    ValueDistribution probs(51);
    double total = 0.0;
    for (double& p : probs) {
      p = rng.uniform();
      total += p;
    }
    for (double& p : probs) p /= total;
    std::vector<double> shifted(51);
    for (double& z : shifted) z = rng.uniform(-60.0, 160.0);
    const ValueDistribution out = categorical_projection(probs, shifted, support);
    double sum = 0.0;
    for (double p : out) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("N = 1 n-step target equals the single-step target bit for bit") {
  DistributionSupport support{51, -20.0, 100.0};
  Rng rng(9);
  ValueDistribution boot(51);
  double total = 0.0;
  for (double& p : boot) {
    p = rng.uniform();
    total += p;
  }
  for (double& p : boot) p /= total;

  const double r = 3.7, zeta = 0.99;
  const ValueDistribution nstep = project_nstep({r}, zeta, boot, support);

  // independent single-step construction
  std::vector<double> shifted = support.atoms();
  for (double& z : shifted) z = r + zeta * z;
  const ValueDistribution single = categorical_projection(boot, shifted, support);
  CHECK(nstep == single);
}

TEST_CASE("zeta = 0 collapses the target onto the first reward") {
  DistributionSupport support{11, 0.0, 10.0};
  ValueDistribution boot(11, 1.0 / 11.0);
  const ValueDistribution out = project_nstep({3.0, 99.0, -50.0}, 0.0, boot, support);
  CHECK(distribution_mean(out, support) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("five-step discounted sum with a zero-mean bootstrap") {
  DistributionSupport support{51, -20.0, 100.0};
  // geometric-series oracle
  double expect = 0.0;
  for (int n = 0; n < 5; ++n) expect += std::pow(0.99, n) * 1.0;

  // bootstrap with exact zero mean: mass split across the atoms around 0
  const std::vector<double> z = support.atoms();
  int lo = 0;
  while (z[lo + 1] <= 0.0) ++lo;
  const double frac = (0.0 - z[lo]) / (z[lo + 1] - z[lo]);
  ValueDistribution boot(51, 0.0);
  boot[lo] = 1.0 - frac;
  boot[lo + 1] = frac;
  REQUIRE(distribution_mean(boot, support) == doctest::Approx(0.0).epsilon(1e-12));

  const ValueDistribution target =
      project_nstep(std::vector<double>(5, 1.0), 0.99, boot, support);
  CHECK(std::abs(distribution_mean(target, support) - expect) <= support.spacing());
  CHECK(expect == doctest::Approx(4.90099501).epsilon(1e-8));
}

TEST_CASE("interior projection preserves the mean exactly") {
  DistributionSupport support{21, -10.0, 10.0};
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    ValueDistribution probs(21);
    double total = 0.0;
    for (double& p : probs) {
      p = rng.uniform();
      total += p;
    }
    for (double& p : probs) p /= total;
    // shift small enough that everything stays inside the support
    const double shift = rng.uniform(-0.9, 0.9);
    std::vector<double> shifted = support.atoms();
    double mean_in = 0.0;
    for (size_t i = 0; i < shifted.size(); ++i) {
      mean_in += probs[i] * shifted[i];
      shifted[i] = std::clamp(shifted[i] * 0.5 + shift, -10.0, 10.0);
    }
    double mean_shifted = 0.0;
    for (size_t i = 0; i < shifted.size(); ++i) mean_shifted += probs[i] * shifted[i];
    const ValueDistribution out = categorical_projection(probs, shifted, support);
    CHECK(distribution_mean(out, support) == doctest::Approx(mean_shifted).epsilon(1e-9));
  }
}

TEST_CASE("support validation") {
  DistributionSupport bad{1, 0.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  DistributionSupport inverted{5, 1.0, 0.0};
  CHECK_THROWS_AS(inverted.validate(), ConfigError);
}
