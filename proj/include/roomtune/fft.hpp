#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace roomtune {

/// Real-to-complex DFT of `x` zero-padded (or truncated) to `n` points.
/// Returns the n/2 + 1 non-negative-frequency bins, unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

/// Inverse of rfft for an n-point signal, scaled by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace roomtune
