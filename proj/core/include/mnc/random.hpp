#pragma once

#include <cstdint>
#include <random>

namespace mnc {

// std::uniform_*_distribution is implementation defined; these helpers keep
// seeded runs byte-identical across standard libraries.

/// Uniform double in [0, 1) built from the top 53 bits.
inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [lo, hi] (inclusive). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return rng();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return lo + draw % range;
}

}  // namespace mnc
