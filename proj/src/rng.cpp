#include "s5eval/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace s5eval {

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Rejection sampling on the top of the 64-bit range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("uniform_real: lo > hi");
  const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
  return lo + u * (hi - lo);
}

std::vector<std::size_t> sample_distinct(std::mt19937_64& rng, std::size_t n,
                                         std::size_t k) {
  if (k > n) {
    throw std::invalid_argument(
        "sample_distinct: pool too small for distinct sampling");
  }
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace s5eval
