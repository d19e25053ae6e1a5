// SPDX-License-Identifier: Apache-2.0
#include "modcalc/stft/stft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "modcalc/core/errors.hpp"
#include "modcalc/core/fourier.hpp"
#include "modcalc/core/parallel.hpp"

namespace modcalc {

namespace {

constexpr const char* kPhaseTag = "e^{-i<y,xi>}";

// Window samples at lattice displacements delta * h with
// delta_k in [-(N_k - 1), N_k - 1], C-ordered over 2 N_k - 1 per axis.
struct DispTable {
  Eigen::ArrayXcd values;
  std::vector<Index> ext_counts;
  Real raw_norm = 0.0;      // discrete l2 norm of the raw samples
  Real applied_norm = 1.0;  // norm of `values` as stored
};

DispTable displacement_table(const Window& w, const UniformGrid& g) {
  const int d = g.dim();
  if (w.dim() != d) {
    throw DimensionError("window dimension does not match the signal grid");
  }
  DispTable t;
  t.ext_counts.resize(d);
  for (int k = 0; k < d; ++k) t.ext_counts[k] = 2 * g.counts[k] - 1;
  t.values.resize(index_count(t.ext_counts));
  Eigen::VectorXd x(d);
  for_each_index(t.ext_counts, [&](const MultiIndex& j, Index lin) {
    for (int k = 0; k < d; ++k) {
      x[k] = static_cast<Real>(j[k] - (g.counts[k] - 1)) * g.steps[k];
    }
    t.values[lin] = w.value(x);
  });
  t.raw_norm = std::sqrt(t.values.abs2().sum() * g.cell_volume());
  if (t.raw_norm <= 1e-12) {
    throw InvalidWindowError(
        "window has (numerically) zero mass on the sampling lattice");
  }
  if (w.unit_l2()) {
    t.values /= t.raw_norm;
    t.applied_norm = 1.0;
  } else {
    t.applied_norm = t.raw_norm;
  }
  return t;
}

// Relative window mass at displacements beyond +-(N-1) h, measured on
// the doubled range.  Tabulated windows vanish outside their box.
Real relative_outside_mass(const Window& w, const UniformGrid& g) {
  if (w.kind() == WindowKind::Tabulated) return 0.0;
  Real inside = 1.0, extended = 1.0;
  for (int k = 0; k < g.dim(); ++k) {
    const Index n = g.counts[k];
    const Real h = g.steps[k];
    Real s_in = 0.0, s_ext = 0.0;
    for (Index delta = -2 * (n - 1); delta <= 2 * (n - 1); ++delta) {
      Real a2;
      if (w.kind() == WindowKind::Gaussian) {
        const Real u = static_cast<Real>(delta) * h / w.sigma();
        a2 = std::exp(-u * u) /
             std::sqrt(std::numbers::pi * w.sigma() * w.sigma());
      } else {
        a2 = std::norm(w.value1(static_cast<Real>(delta) * h));
      }
      s_ext += a2;
      if (std::abs(delta) <= n - 1) s_in += a2;
    }
    inside *= s_in * h;
    extended *= s_ext * h;
  }
  if (inside <= 0.0) return 0.0;
  return (extended - inside) / inside;
}

Index disp_linear(const std::vector<Index>& ext_counts,
                  const std::vector<Index>& counts,
                  const std::vector<Index>& stride, const MultiIndex& j,
                  const MultiIndex& m) {
  Index lin = 0;
  for (size_t k = 0; k < ext_counts.size(); ++k) {
    lin = lin * ext_counts[k] + (j[k] - m[k] * stride[k] + counts[k] - 1);
  }
  return lin;
}

std::vector<Index> lattice_counts_of(const UniformGrid& signal,
                                     const std::vector<Index>& stride) {
  std::vector<Index> m(signal.dim());
  for (int k = 0; k < signal.dim(); ++k) m[k] = signal.counts[k] / stride[k];
  return m;
}

}  // namespace

UniformGrid Spectrogram::lattice_grid() const {
  const int d = signal_grid.dim();
  const UniformGrid& phase = field.grid();
  std::vector<Index> counts(phase.counts.begin(), phase.counts.begin() + d);
  return UniformGrid(OrderedBasis::identity(d), counts, phase.steps.head(d),
                     phase.offsets.head(d));
}

UniformGrid Spectrogram::frequency_grid() const {
  return reciprocal_grid(signal_grid);
}

Index Spectrogram::lattice_size() const {
  const int d = signal_grid.dim();
  std::vector<Index> counts(field.grid().counts.begin(),
                            field.grid().counts.begin() + d);
  return index_count(counts);
}

Index Spectrogram::bin_count() const { return signal_grid.size(); }

Complex Spectrogram::at(const MultiIndex& m, const MultiIndex& k) const {
  const int d = signal_grid.dim();
  std::vector<Index> lat(field.grid().counts.begin(),
                         field.grid().counts.begin() + d);
  return field(linear_index(lat, m) * bin_count() +
               linear_index(signal_grid.counts, k));
}

Spectrogram stft(const SampledField& f, const Window& window,
                 const std::vector<Index>& stride_in,
                 std::string signal_meta) {
  const UniformGrid& g = f.grid();
  const int d = g.dim();
  if (!g.basis.is_identity()) {
    throw UnsupportedBasisError("stft requires an identity-basis grid");
  }
  ensure_finite(f, "stft input");

  std::vector<Index> stride = stride_in;
  if (stride.empty()) stride.assign(d, 1);
  if (static_cast<int>(stride.size()) != d) {
    throw ConfigError("stride must list one factor per signal axis");
  }
  for (int k = 0; k < d; ++k) {
    if (stride[k] < 1 || g.counts[k] % stride[k] != 0) {
      throw ConfigError("stride must be positive and divide the axis counts");
    }
  }
  if (window.kind() == WindowKind::Tabulated &&
      !window.table()->grid().same_layout(g)) {
    throw AlignmentError("tabulated window must share the signal grid");
  }

  const DispTable table = displacement_table(window, g);
  const Real outside = relative_outside_mass(window, g);

  const UniformGrid freq = reciprocal_grid(g);
  const std::vector<Index> lat_counts = lattice_counts_of(g, stride);
  const Index nlat = index_count(lat_counts);
  const Index nbins = g.size();

  std::vector<Index> phase_counts(2 * d);
  Eigen::ArrayXd phase_steps(2 * d), phase_offsets(2 * d);
  for (int k = 0; k < d; ++k) {
    phase_counts[k] = lat_counts[k];
    phase_steps[k] = g.steps[k] * static_cast<Real>(stride[k]);
    phase_offsets[k] = g.offsets[k];
    phase_counts[d + k] = freq.counts[k];
    phase_steps[d + k] = freq.steps[k];
    phase_offsets[d + k] = freq.offsets[k];
  }
  UniformGrid phase(OrderedBasis::identity(2 * d), phase_counts, phase_steps,
                    phase_offsets);

  Eigen::ArrayXcd out(nlat * nbins);
  parallel_for(nlat, [&](Index begin, Index end) {
    MultiIndex m(d);
    for (Index ml = begin; ml < end; ++ml) {
      unravel_index(lat_counts, ml, m);
      Eigen::ArrayXcd seg(nbins);
      for_each_index(g.counts, [&](const MultiIndex& j, Index lin) {
        seg[lin] =
            f(lin) *
            std::conj(table.values[disp_linear(table.ext_counts, g.counts,
                                               stride, j, m)]);
      });
      const SampledField spectrum = fourier_transform(SampledField(g, seg));
      out.segment(ml * nbins, nbins) = spectrum.values();
    }
  });

  return Spectrogram{SampledField(phase, std::move(out)),
                     g,
                     std::move(stride),
                     window,
                     std::move(signal_meta),
                     table.applied_norm,
                     outside,
                     outside > 1e-12};
}

IstftResult istft(const Spectrogram& S, const Window& synthesis) {
  const UniformGrid& g = S.signal_grid;
  const int d = g.dim();
  if (synthesis.kind() == WindowKind::Tabulated &&
      !synthesis.table()->grid().same_layout(g)) {
    throw AlignmentError("tabulated window must share the signal grid");
  }
  const DispTable synth = displacement_table(synthesis, g);
  const DispTable analysis = displacement_table(S.window, g);
  const Complex denom =
      (synth.values * analysis.values.conjugate()).sum() * g.cell_volume();
  if (std::abs(denom) <= 1e-12) {
    throw InvalidWindowError(
        "analysis and synthesis windows are (numerically) orthogonal");
  }

  const UniformGrid freq = reciprocal_grid(g);
  const std::vector<Index> lat_counts = lattice_counts_of(g, S.stride);
  const Index nlat = index_count(lat_counts);
  const Index nbins = g.size();
  if (S.field.size() != nlat * nbins) {
    throw DimensionError("spectrogram field does not match its grids");
  }

  // Per-column inverse transforms (disjoint writes), ...
  Eigen::ArrayXcd slices(nlat * nbins);
  parallel_for(nlat, [&](Index begin, Index end) {
    for (Index ml = begin; ml < end; ++ml) {
      const SampledField spectrum(
          freq, S.field.values().segment(ml * nbins, nbins));
      slices.segment(ml * nbins, nbins) =
          inverse_fourier(spectrum, g).values();
    }
  });

  // ... then a serial overlap-add so the summation order is fixed.
  Real lattice_cell = 1.0;
  for (int k = 0; k < d; ++k) {
    lattice_cell *= g.steps[k] * static_cast<Real>(S.stride[k]);
  }
  Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(nbins);
  MultiIndex m(d);
  for (Index ml = 0; ml < nlat; ++ml) {
    unravel_index(lat_counts, ml, m);
    for_each_index(g.counts, [&](const MultiIndex& j, Index lin) {
      acc[lin] += slices[ml * nbins + lin] *
                  synth.values[disp_linear(synth.ext_counts, g.counts,
                                           S.stride, j, m)];
    });
  }
  acc *= lattice_cell / denom;
  return IstftResult{SampledField(g, std::move(acc)),
                     synthesis.same_window(S.window)};
}

IstftResult istft(const Spectrogram& S) { return istft(S, S.window); }

void save_spectrogram(const Spectrogram& S, const std::string& path) {
  MetadataBlocks meta;
  meta["STFT"] = {{"window", S.window.to_json()},
                  {"stride", S.stride},
                  {"phase", kPhaseTag},
                  {"signal_dim", S.signal_dim()},
                  {"signal_meta", S.signal_meta},
                  {"window_norm", S.window_norm},
                  {"periodization_mass", S.periodization_mass},
                  {"periodization_flagged", S.periodization_flagged}};
  save_field(S.field, path, meta);
}

Spectrogram load_spectrogram(const std::string& path) {
  MetadataBlocks meta;
  SampledField field = load_field(path, &meta);
  const auto it = meta.find("STFT");
  if (it == meta.end()) {
    throw FormatError("file carries no STFT metadata block");
  }
  try {
    const nlohmann::json& b = it->second;
    if (b.at("phase").get<std::string>() != kPhaseTag) {
      throw FormatError("unsupported STFT phase convention tag");
    }
    const int d = b.at("signal_dim").get<int>();
    auto stride = b.at("stride").get<std::vector<Index>>();
    const UniformGrid& phase = field.grid();
    if (phase.dim() != 2 * d || static_cast<int>(stride.size()) != d) {
      throw FormatError("STFT block inconsistent with the stored grid");
    }
    std::vector<Index> counts(d);
    Eigen::ArrayXd steps(d), offsets(d);
    for (int k = 0; k < d; ++k) {
      counts[k] = phase.counts[d + k];
      steps[k] = phase.steps[k] / static_cast<Real>(stride[k]);
      offsets[k] = phase.offsets[k];
    }
    UniformGrid signal(OrderedBasis::identity(d), counts, steps, offsets);
    return Spectrogram{std::move(field),
                       std::move(signal),
                       std::move(stride),
                       Window::from_json(b.at("window")),
                       b.value("signal_meta", std::string{}),
                       b.value("window_norm", 1.0),
                       b.value("periodization_mass", 0.0),
                       b.value("periodization_flagged", false)};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed STFT block: ") + e.what());
  }
}

}  // namespace modcalc
