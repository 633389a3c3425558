#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace xbx {

/// Seeded random stream. Every variate is produced by code in this project on
/// top of the 64-bit Mersenne twister, so draws are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Exponential with the given mean.
  double exponential(double mean);
  /// log of a Gamma(shape, 1) draw (Marsaglia-Tsang). Returned on the log scale
  /// so that tiny shapes do not underflow.
  double log_gamma_variate(double shape);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based seed derivation: mixes `base` with each key in turn.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

}  // namespace xbx
