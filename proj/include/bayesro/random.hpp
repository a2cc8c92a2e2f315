#pragma once

#include <cstdint>
#include <random>

namespace bayesro {

/// Reproducible random source. A given (seed, stream) pair yields the same
/// sequence bit-for-bit on every platform: the engine is the fully specified
/// std::mt19937_64 and every transform below is implemented here rather than
/// delegated to implementation-defined <random> distributions.
///
/// Streams are decorrelated by hashing (seed, stream) into the engine seed;
/// parallel workers must each own their own (seed, stream) pair.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform on [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0,1); safe as input to inverse CDFs.
  double next_open01() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via the inverse CDF.
  double normal();

  /// Exponential with the given mean.
  double exponential(double mean);

  /// Gamma(shape, scale) via Marsaglia-Tsang squeeze.
  double gamma(double shape, double scale);

  /// Poisson by sequential CDF inversion; intended for moderate means.
  long poisson(double mean);

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
};

}  // namespace bayesro
