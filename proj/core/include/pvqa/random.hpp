#pragma once

#include <cstdint>
#include <random>

namespace pvqa {

// std::uniform_*_distribution output is implementation-defined; these helpers
// keep seeded results identical across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [lo, hi] by rejection sampling.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw = rng();
  while (draw >= limit) {
    draw = rng();
  }
  return lo + static_cast<std::int64_t>(draw % span);
}

}  // namespace pvqa
