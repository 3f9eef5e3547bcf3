#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace exactmppi {

// Counter-based generator: every draw is a pure function of its key, so the
// stream is identical however the batch is partitioned.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
}

/// Uniform in (0, 1].
inline double uniform01(std::uint64_t h) {
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal keyed by (seed, a, b, c, d) via Box-Muller.
inline double gaussian_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                          std::uint64_t d) {
  std::uint64_t k = splitmix64(seed);
  k = hash_combine(k, a);
  k = hash_combine(k, b);
  k = hash_combine(k, c);
  k = hash_combine(k, d);
  double u1 = uniform01(hash_combine(k, 0xD1B54A32D192ED03ull));
  double u2 = uniform01(hash_combine(k, 0x8CB92BA72F3D8DD7ull));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Uniform integer in [0, n) keyed by (seed, a, b).
inline std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                   std::uint64_t n) {
  std::uint64_t k = splitmix64(seed);
  k = hash_combine(k, a);
  k = hash_combine(k, b);
  return n == 0 ? 0 : k % n;
}

/// Uniform in [lo, hi) keyed by (seed, a, b).
inline double uniform_range(std::uint64_t seed, std::uint64_t a, std::uint64_t b, double lo,
                            double hi) {
  std::uint64_t k = splitmix64(seed);
  k = hash_combine(k, a);
  k = hash_combine(k, b);
  double u = static_cast<double>(k >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + u * (hi - lo);
}

}  // namespace exactmppi
