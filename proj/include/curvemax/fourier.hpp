#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "curvemax/field.hpp"

namespace curvemax {

using Spectrum = std::vector<std::complex<double>>;

/// Angular frequencies 2 pi k / L of an n-point periodic grid, FFT order.
std::vector<double> grid_frequencies(std::size_t n, double L);

/// Unnormalized forward DFT over storage indices. The grid offset only
/// contributes a phase that cancels in every multiplier round trip.
Spectrum fft2(const SampledField2D& f);
/// Inverse of fft2, including the 1/n^2 factor; returns the real part.
SampledField2D ifft2_real(const Spectrum& s, std::size_t n, double L);
/// Complex-in, complex-out versions on raw n x n arrays.
Spectrum fft2(const Spectrum& data, std::size_t n);
Spectrum ifft2(const Spectrum& s, std::size_t n);

/// F^{-1}[m F f] for a multiplier sampled on grid_frequencies (row-major,
/// m[k1 * n + k2] at (xi_{k1}, xi_{k2})).
SampledField2D apply_multiplier(const SampledField2D& f, const Spectrum& m);

}  // namespace curvemax
