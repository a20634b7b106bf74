#include "cellfree/rng.hpp"

#include <cmath>

#include "cellfree/errors.hpp"

namespace cellfree {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(mix64(mix64(seed) ^ mix64(~stream_id)));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::gamma(double shape, double scale) {
  if (shape < 0.5 || scale <= 0.0) {
    throw ConfigError("gamma sampler requires shape >= 0.5 and scale > 0");
  }
  if (shape < 1.0) {
    // boost: X ~ Gamma(shape+1), X * U^(1/shape) ~ Gamma(shape)
    const double x = gamma(shape + 1.0, scale);
    return x * std::pow(uniform_nonzero_(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_nonzero_();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

std::complex<double> Rng::cnormal(double var_total) {
  const double s = std::sqrt(var_total / 2.0);
  const double re = normal() * s;
  const double im = normal() * s;
  return {re, im};
}

double Rng::phase() { return 2.0 * M_PI * uniform(); }

}  // namespace cellfree
