#pragma once

// Counter-based seed derivation. Every random quantity in the library is
// drawn from a generator seeded by (master seed, stream name, index), so
// results never depend on scheduling or on the order streams are opened.

#include <cstdint>
#include <random>
#include <string_view>

namespace optcs {

using Rng = std::mt19937_64;

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

inline Rng substream(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace optcs
