#include "bayesro/random.hpp"

#include <cmath>

#include "bayesro/errors.hpp"
#include "bayesro/special.hpp"

namespace bayesro {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + 1));
  eng_.seed(s);
}

double RandomSource::normal() { return special::normal_quantile(next_open01()); }

double RandomSource::exponential(double mean) {
  if (!(mean > 0.0)) throw DomainError("RandomSource::exponential: mean must be positive");
  return -mean * std::log(next_open01());
}

double RandomSource::gamma(double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0))
    throw DomainError("RandomSource::gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and rescale by u^{1/shape}.
    double u = next_open01();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = next_open01();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

long RandomSource::poisson(double mean) {
  if (!(mean > 0.0)) throw DomainError("RandomSource::poisson: mean must be positive");
  if (mean > 700.0) throw DomainError("RandomSource::poisson: mean too large for inversion");
  double u = next_open01();
  double p = std::exp(-mean);
  double cdf = p;
  long k = 0;
  while (u > cdf && k < 100000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace bayesro
