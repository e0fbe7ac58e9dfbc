#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace ngp {

// Deterministic random-number utilities. Everything here is fully specified
// (no implementation-defined std::*_distribution), so seeded runs produce
// identical streams on any platform.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from (base, stream index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  std::uint64_t a = splitmix64_next(s);
  return a ^ splitmix64_next(s);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t s1, std::uint64_t s2) {
  return derive_seed(derive_seed(base, s1), s2);
}

/// Stable 64-bit hash of a double vector, keyed by seed. Used for
/// deterministic ("computational") noise that depends only on the point.
inline std::uint64_t hash_point(std::uint64_t seed, std::span<const double> x) {
  std::uint64_t h = seed ^ 0xA0761D6478BD642FULL;
  for (double v : x) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    __builtin_memcpy(&bits, &v, sizeof(bits));
    h ^= bits;
    h = splitmix64_next(h);
  }
  return h;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x853C49E6748FEA9BULL) {
    // burn-in decorrelates near-identical seeds
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller; always consumes exactly two draws.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

private:
  std::uint64_t state_;
};

/// Uniform in [-1, 1] derived from a single hash value.
inline double hash_to_symmetric_uniform(std::uint64_t h) {
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace ngp
