#pragma once
#include <cstdint>
#include <random>

namespace cld {

/// Uniform double in [0,1) from the top 53 bits of the engine output.
/// std::uniform_real_distribution is not bit-stable across standard library
/// implementations; this mapping is, and mt19937_64 itself is pinned by the
/// standard, so seeded runs reproduce bit-identically.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Decorrelated deterministic sub-stream seed (splitmix64 mix), used to give
/// each field component its own RNG stream.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace cld
