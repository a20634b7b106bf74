#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace cellfree {

/// Seedable random stream with hand-rolled samplers.
///
/// The engine (mt19937_64) is bit-exact across platforms and all
/// distributions are implemented here rather than taken from <random>,
/// so a (seed, stream) pair reproduces the same values everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Derives an independent sub-stream from a master seed. Stream ids are
  /// fixed per purpose (geometry, fading, pilots, ...) so that adding a
  /// consumer never perturbs existing streams.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the polar method; one spare value is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Gamma(shape, scale) via Marsaglia-Tsang, with the usual power boost
  /// for shape < 1.
  double gamma(double shape, double scale);

  /// Circularly symmetric complex Gaussian with E|x|^2 = var_total
  /// (var_total/2 per real dimension).
  std::complex<double> cnormal(double var_total);

  /// Uniform phase on [0, 2*pi).
  double phase();

 private:
  double uniform_nonzero_() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; used for seed mixing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace cellfree
