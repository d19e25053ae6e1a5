// SPDX-License-Identifier: Apache-2.0
//
// Fourier transforms on uniform grids with the unitary convention
//
//   (F f)(xi) = (2 pi)^{-d/2} \int f(x) e^{-i <x, xi>} dx .
//
// The forward transform treats the samples as a midpoint quadrature of
// that integral; the result lives on the reciprocal grid with spacing
// dxi_k = 2 pi / (N_k h_k) and zero-centered bins.  Offsets of the
// input grid become explicit phase factors, so transforms of fields on
// shifted grids agree with the continuum formula, and the inverse on a
// compatible grid undoes the forward exactly (in exact arithmetic).

#ifndef MODCALC_CORE_FOURIER_HPP
#define MODCALC_CORE_FOURIER_HPP

#include "modcalc/core/field.hpp"

namespace modcalc {

// Frequency grid dual to g: same counts, spacing 2 pi / (N h),
// zero-centered bins (bin floor(N/2) sits at frequency zero).
UniformGrid reciprocal_grid(const UniformGrid& g);

// True when `freq` could have been produced by reciprocal_grid(g)
// up to relative tolerance on the spacings (offsets may differ).
bool reciprocal_compatible(const UniformGrid& g, const UniformGrid& freq,
                           Real tol = 1e-9);

SampledField fourier_transform(const SampledField& f);

// Inverse transform.  The default target grid is cell-centered around
// the origin with spacing 2 pi / (N dxi); pass `target` to evaluate on
// another grid with the same counts and spacing (different offsets).
SampledField inverse_fourier(const SampledField& spectrum);
SampledField inverse_fourier(const SampledField& spectrum,
                             const UniformGrid& target);

// Raw unnormalized DFT along every axis of a C-ordered array
// (e^{-2 pi i j m / N}); inverse is the conjugate transform, unscaled.
// Building block for cyclic convolutions.
void cyclic_dft(Eigen::ArrayXcd& data, const std::vector<Index>& counts,
                bool inverse);

// Partial derivative of multi-order alpha via frequency multipliers.
// Refuses (OrderTooHighError) when round-off at the outermost bins
// would be amplified past `max_amplification` relative to the largest
// coefficient of the differentiated spectrum.
SampledField spectral_derivative(const SampledField& f,
                                 const MultiIndex& alpha,
                                 Real max_amplification = 1e12);

}  // namespace modcalc

#endif
