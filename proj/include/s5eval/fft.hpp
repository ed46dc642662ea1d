#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace s5eval::detail {

std::size_t next_pow2(std::size_t n);

/// In-place radix-2 transform. a.size() must be a power of two.
/// The inverse applies the 1/N normalization.
void fft(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace s5eval::detail
