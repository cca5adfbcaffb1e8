#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lf::synth {

using Complex = std::complex<double>;

enum class FftDirection { Forward, Backward };

/// Unnormalized 2-D DFT of a row-major ny x nx array (FFTW, sign -1 forward, +1 backward).
/// Plan creation is serialized internally; execution is thread-safe.
void fft2d(std::vector<Complex>& data, std::size_t nx, std::size_t ny, FftDirection dir);

/// Signed integer frequency of DFT bin k on an n-point axis: 0, 1, ..., n/2, -(n/2 - 1), ..., -1.
inline double signed_frequency(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

}  // namespace lf::synth
