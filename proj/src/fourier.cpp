// SPDX-License-Identifier: Apache-2.0
#include "modcalc/core/fourier.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace modcalc {

namespace {

constexpr Real kTwoPi = 2.0 * std::numbers::pi_v<Real>;

// In-place unnormalized DFT along one axis of a C-ordered array
// (e^{-2 pi i j m / N} for forward; conjugate, unscaled, for inverse).
void dft_axis(Eigen::ArrayXcd& data, const std::vector<Index>& counts,
              int axis, bool inverse) {
  const Index n = counts[axis];
  if (n == 1) return;
  Index stride = 1;
  for (size_t k = axis + 1; k < counts.size(); ++k) stride *= counts[k];
  const Index total = data.size();
  const Index block = n * stride;

  Eigen::FFT<Real> fft;
  std::vector<Complex> line(n), out(n);
  for (Index b = 0; b < total; b += block) {
    for (Index s = 0; s < stride; ++s) {
      const Index base = b + s;
      for (Index t = 0; t < n; ++t) line[t] = data[base + t * stride];
      if (inverse) {
        for (auto& z : line) z = std::conj(z);
        fft.fwd(out, line);
        for (auto& z : out) z = std::conj(z);
      } else {
        fft.fwd(out, line);
      }
      for (Index t = 0; t < n; ++t) data[base + t * stride] = out[t];
    }
  }
}

void require_identity_basis(const UniformGrid& g, const char* what) {
  if (!g.basis.is_identity(1e-14)) {
    throw UnsupportedBasisError(
        std::string(what) + " requires an identity-basis grid");
  }
}

}  // namespace

void cyclic_dft(Eigen::ArrayXcd& data, const std::vector<Index>& counts,
                bool inverse) {
  if (index_count(counts) != data.size()) {
    throw DimensionError("cyclic_dft: counts do not match data size");
  }
  for (size_t k = 0; k < counts.size(); ++k) {
    dft_axis(data, counts, static_cast<int>(k), inverse);
  }
}

UniformGrid reciprocal_grid(const UniformGrid& g) {
  const int d = g.dim();
  Eigen::ArrayXd dxi(d), off(d);
  for (int k = 0; k < d; ++k) {
    dxi[k] = kTwoPi / (static_cast<Real>(g.counts[k]) * g.steps[k]);
    off[k] = -static_cast<Real>(g.counts[k] / 2) * dxi[k];
  }
  return UniformGrid(OrderedBasis::identity(d), g.counts, dxi, off);
}

bool reciprocal_compatible(const UniformGrid& g, const UniformGrid& freq,
                           Real tol) {
  if (g.dim() != freq.dim() || g.counts != freq.counts) return false;
  if (!freq.basis.is_identity(1e-14)) return false;
  for (int k = 0; k < g.dim(); ++k) {
    const Real expect = kTwoPi / (static_cast<Real>(g.counts[k]) * g.steps[k]);
    if (std::abs(freq.steps[k] - expect) > tol * expect) return false;
  }
  return true;
}

SampledField fourier_transform(const SampledField& f) {
  const UniformGrid& g = f.grid();
  require_identity_basis(g, "fourier_transform");
  ensure_finite(f, "fourier_transform input");

  const int d = g.dim();
  Eigen::ArrayXcd work = f.values();
  for (int k = 0; k < d; ++k) dft_axis(work, g.counts, k, false);

  UniformGrid freq = reciprocal_grid(g);
  const Real scale = std::pow(kTwoPi, -0.5 * d) * g.steps.prod();

  SampledField out(freq);
  std::vector<Index> center(d);
  for (int k = 0; k < d; ++k) center[k] = g.counts[k] / 2;
  MultiIndex bin(d);
  for_each_index(g.counts, [&](const MultiIndex& q, Index lin) {
    Real phase = 0.0;
    for (int k = 0; k < d; ++k) {
      bin[k] = (q[k] - center[k] + g.counts[k]) % g.counts[k];
      phase -= g.offsets[k] * freq.coordinate(k, q[k]);
    }
    out(lin) = scale * std::polar(1.0, phase) * work[linear_index(g.counts, bin)];
  });
  ensure_finite(out, "fourier_transform output");
  return out;
}

SampledField inverse_fourier(const SampledField& spectrum) {
  const UniformGrid& fg = spectrum.grid();
  const int d = fg.dim();
  Eigen::ArrayXd steps(d), offsets(d);
  for (int k = 0; k < d; ++k) {
    steps[k] = kTwoPi / (static_cast<Real>(fg.counts[k]) * fg.steps[k]);
    offsets[k] =
        0.5 * steps[k] - 0.5 * static_cast<Real>(fg.counts[k]) * steps[k];
  }
  return inverse_fourier(
      spectrum,
      UniformGrid(OrderedBasis::identity(d), fg.counts, steps, offsets));
}

SampledField inverse_fourier(const SampledField& spectrum,
                             const UniformGrid& target) {
  const UniformGrid& fg = spectrum.grid();
  require_identity_basis(fg, "inverse_fourier");
  require_identity_basis(target, "inverse_fourier");
  ensure_finite(spectrum, "inverse_fourier input");
  if (!reciprocal_compatible(target, fg)) {
    throw DimensionError(
        "inverse_fourier: target grid is not reciprocal-compatible with the "
        "spectrum grid");
  }

  const int d = fg.dim();
  // P_q = F_q e^{i <o_target, q dxi>}; then an unnormalized inverse DFT
  // and the outer phase e^{i <x_j, xi_0>} evaluate the quadrature of
  // (2 pi)^{-d/2} \int F(xi) e^{i <x, xi>} dxi at the target points.
  Eigen::ArrayXcd work(spectrum.size());
  for_each_index(fg.counts, [&](const MultiIndex& q, Index lin) {
    Real phase = 0.0;
    for (int k = 0; k < d; ++k) {
      phase += target.offsets[k] * static_cast<Real>(q[k]) * fg.steps[k];
    }
    work[lin] = spectrum(lin) * std::polar(1.0, phase);
  });
  for (int k = 0; k < d; ++k) dft_axis(work, fg.counts, k, true);

  const Real scale = std::pow(kTwoPi, -0.5 * d) * fg.steps.prod();
  SampledField out(target);
  for_each_index(target.counts, [&](const MultiIndex& j, Index lin) {
    Real phase = 0.0;
    for (int k = 0; k < d; ++k) {
      phase += target.coordinate(k, j[k]) * fg.offsets[k];
    }
    out(lin) = scale * std::polar(1.0, phase) * work[lin];
  });
  ensure_finite(out, "inverse_fourier output");
  return out;
}

SampledField spectral_derivative(const SampledField& f,
                                 const MultiIndex& alpha,
                                 Real max_amplification) {
  const UniformGrid& g = f.grid();
  const int d = g.dim();
  if (static_cast<int>(alpha.size()) != d) {
    throw DimensionError("derivative order must have one entry per axis");
  }
  for (Index a : alpha) {
    if (a < 0) throw DimensionError("derivative orders must be >= 0");
  }

  SampledField spec = fourier_transform(f);
  const UniformGrid& fg = spec.grid();

  // Worst-case gain at the outermost bins vs. the dominant coefficient
  // of the differentiated spectrum; refusing keeps round-off noise at
  // or below ~max_amplification * machine-eps of the result.
  Real top_gain = 1.0;
  for (int k = 0; k < d; ++k) {
    const Real xi_max = std::max(std::abs(fg.coordinate(k, 0)),
                                 std::abs(fg.coordinate(k, fg.counts[k] - 1)));
    for (Index t = 0; t < alpha[k]; ++t) top_gain *= xi_max;
  }
  Real peak_in = 0.0, peak_out = 0.0;
  Eigen::ArrayXcd& v = spec.values();
  Eigen::ArrayXcd mult(v.size());
  for_each_index(fg.counts, [&](const MultiIndex& q, Index lin) {
    Complex m(1.0, 0.0);
    for (int k = 0; k < d; ++k) {
      const Complex ixi(0.0, fg.coordinate(k, q[k]));
      for (Index t = 0; t < alpha[k]; ++t) m *= ixi;
    }
    mult[lin] = m;
    peak_in = std::max(peak_in, std::abs(v[lin]));
    peak_out = std::max(peak_out, std::abs(m) * std::abs(v[lin]));
  });
  if (peak_in > 0.0) {
    // Whole differentiated spectrum at the input's round-off floor:
    // the derivative is numerically zero, not unstable.
    if (peak_out <= peak_in * 1e-15) {
      return SampledField(g);
    }
    const Real amplification = top_gain * peak_in / peak_out;
    if (amplification > max_amplification) {
      throw OrderTooHighError(
          "spectral_derivative: requested order would amplify round-off by " +
          std::to_string(amplification));
    }
  }
  v *= mult;
  return inverse_fourier(spec, g);
}

}  // namespace modcalc
