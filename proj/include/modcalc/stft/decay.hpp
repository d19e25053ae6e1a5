// SPDX-License-Identifier: Apache-2.0
//
// Window/signal quality diagnostics: Gelfand–Shilov-type seminorms on
// sampled fields and envelope fits of spectrogram decay.

#ifndef MODCALC_STFT_DECAY_HPP
#define MODCALC_STFT_DECAY_HPP

#include "modcalc/stft/stft.hpp"
#include "modcalc/weights/weight.hpp"

namespace modcalc {

// Truncated seminorm
//   sup_{|alpha|,|beta| <= max_order} sup_x |x^beta d^alpha f(x)|
//       / (h^{|alpha+beta|} alpha!^s beta!^sigma)
// with spectral derivatives.  Non-increasing in h by construction.
Real gs_seminorm(const SampledField& f, Real s, Real sigma, Real h,
                 int max_order);

struct DecayFit {
  Real C = 0.0;
  Real r = 0.0;
  // envelope(x, xi) - |V(x, xi)| on the phase grid; zero where the
  // fitted bound binds, nonnegative elsewhere (up to rounding).
  SampledField residual;
  // The spectrogram magnitude at the xi boundary relative to its peak.
  Real boundary_level = 0.0;
  // Set when boundary_level > 1e-10: mass leaves the frequency box,
  // so the true decay rate can only be bounded from below.
  bool r_is_lower_bound = false;
  Index samples_used = 0;
};

// Fits the largest r and smallest C with
//   |V(x, xi)| <= C omega(x) e^{-r |xi|^{1/s}}
// at every phase-space sample, choosing r by minimizing the mean
// log-slack of the envelope (exact on data that meets the bound with
// equality).  Zero samples are skipped; an all-zero spectrogram has
// no fit (UndefinedFitError).
DecayFit stft_decay_fit(const Spectrogram& S, const Weight& omega, Real s);

}  // namespace modcalc

#endif
