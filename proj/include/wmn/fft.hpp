#pragma once

// Arbitrary-length complex DFTs (FFTW underneath). Plans are cached per
// length and shared between threads; execution is reentrant.

#include <complex>
#include <span>
#include <vector>

namespace wmn::fft {

using cplx = std::complex<double>;

/// X_s = sum_j x_j exp(-2 pi i j s / n)
std::vector<cplx> forward(std::span<const cplx> x);

/// x_j = sum_s X_s exp(+2 pi i j s / n), no 1/n factor.
std::vector<cplx> backward(std::span<const cplx> x);

}  // namespace wmn::fft
