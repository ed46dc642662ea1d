#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace s5eval {

/// splitmix64 step; used to derive independent per-scene seeds from one
/// master seed so parallel synthesis order never changes the output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Unbiased draw in [0, n); byte-stable across platforms (the standard
/// distributions are not).
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

/// Uniform double in [lo, hi), built from the top 53 bits of the stream.
double uniform_real(std::mt19937_64& rng, double lo, double hi);

/// First k entries of a seeded Fisher-Yates shuffle of {0..n-1}; k <= n.
std::vector<std::size_t> sample_distinct(std::mt19937_64& rng, std::size_t n,
                                         std::size_t k);

}  // namespace s5eval
