#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace relctl {

/// Deterministic random source wrapping std::mt19937_64.
///
/// Only the raw 64-bit stream of mt19937_64 is consumed; uniform, normal and
/// index draws are derived here with fixed arithmetic instead of the standard
/// distributions, whose output is implementation-defined. Two builds with the
/// same seed therefore produce the same stream on any platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; caches the spare deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform index in [0, n). Modulo reduction of the raw 64-bit draw; the
  /// bias is below 2^-50 for any n that fits a trajectory and the mapping is
  /// trivially replicated by an independent implementation.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(gen_() % static_cast<std::uint64_t>(n));
  }

private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace relctl
