// SPDX-License-Identifier: Apache-2.0
//
// Short-time Fourier transform on uniform grids,
//
//   V_phi f(x, xi) = (2 pi)^{-d/2} \int f(y) conj(phi(y - x)) e^{-i <y, xi>} dy ,
//
// its overlap-add inversion, and file round trips.  The x lattice is a
// sub-lattice of the signal grid (per-axis stride); the xi grid is the
// signal grid's reciprocal.  The phase factor is e^{-i<y,xi>}, not the
// e^{-i<y-x,xi>} variant — magnitudes agree, phases do not.

#ifndef MODCALC_STFT_STFT_HPP
#define MODCALC_STFT_STFT_HPP

#include <string>
#include <vector>

#include "modcalc/stft/window.hpp"

namespace modcalc {

struct Spectrogram {
  // Values on the 2d phase-space grid: x axes first, then xi axes,
  // C order (last axis fastest).
  SampledField field;
  UniformGrid signal_grid;
  std::vector<Index> stride;  // per signal axis, divides the counts
  Window window;
  std::string signal_meta;

  // Discrete l2 norm of the window as applied (1 when unit_l2).
  Real window_norm = 1.0;
  // Relative window mass at displacements beyond the signal box; when
  // above 1e-12 the periodized transform differs from the continuum
  // one and the flag is set.
  Real periodization_mass = 0.0;
  bool periodization_flagged = false;

  int signal_dim() const { return signal_grid.dim(); }
  UniformGrid lattice_grid() const;    // the x sub-lattice
  UniformGrid frequency_grid() const;  // reciprocal of the signal grid

  // Number of x-lattice points / frequency bins.
  Index lattice_size() const;
  Index bin_count() const;

  // Value at (lattice multi-index m, frequency multi-index k).
  Complex at(const MultiIndex& m, const MultiIndex& k) const;
};

// Analysis.  An empty stride means 1 on every axis.  Requires an
// identity-basis grid; Tabulated windows must share the signal grid's
// layout.  Throws InvalidWindowError when the window's mass on the
// displacement lattice is (numerically) zero.
Spectrogram stft(const SampledField& f, const Window& window,
                 const std::vector<Index>& stride = {},
                 std::string signal_meta = {});

struct IstftResult {
  SampledField signal;
  // False when the synthesis window differs from the analysis window;
  // reconstruction then has no round-trip guarantee.
  bool windows_matched = true;
};

// Overlap-add synthesis:
//   f(x) = <psi, phi>^{-1} * sum_m IFT[V(m, .)](x) psi(x - x_m) dx_lattice .
// Throws InvalidWindowError when the synthesis/analysis windows are
// (numerically) orthogonal on the displacement lattice.
IstftResult istft(const Spectrogram& S, const Window& synthesis);
IstftResult istft(const Spectrogram& S);

// Lattice-core binary container with an "STFT" metadata block
// (window, stride, phase tag, signal grid).
void save_spectrogram(const Spectrogram& S, const std::string& path);
Spectrogram load_spectrogram(const std::string& path);

}  // namespace modcalc

#endif
