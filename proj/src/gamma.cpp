// SPDX-License-Identifier: Apache-2.0
#include "modcalc/pdo/gamma.hpp"

#include <cmath>
#include <limits>

#include "modcalc/pdo/op.hpp"
#include "modcalc/stft/decay.hpp"
#include "modcalc/stft/stft.hpp"

namespace modcalc {

namespace {

SampledField symbol_field(const Symbol& a, const GammaOptions& options) {
  if (!a.closed()) return a.data();
  const UniformGrid grid = UniformGrid::centered(
      2 * a.dim(), options.samples_per_axis, options.half_width);
  return sample(grid, [&](const Eigen::VectorXd& z) { return a.value(z); });
}

}  // namespace

nlohmann::json GammaReport::to_json() const {
  nlohmann::json j = {{"mode", mode},
                      {"verdict", verdict},
                      {"C", C},
                      {"rate", rate}};
  if (mode == "stft") {
    j["boundary_level"] = boundary_level;
    j["rate_is_lower_bound"] = rate_is_lower_bound;
    j["sweep_rate"] = sweep_rate;
    j["sweep_log_C"] = sweep_log_C;
  } else {
    j["derivative"] = modcalc::to_json(derivative);
  }
  return j;
}

GammaReport gamma_membership(const Symbol& a, const Weight& omega0, Real s,
                             GammaMode mode, const GammaOptions& options) {
  if (a.dim() != 1) {
    throw DimensionError("the gamma diagnostics handle one signal dimension");
  }
  if (omega0.dim() != 2 * a.dim()) {
    throw DimensionError("the envelope weight lives on phase space");
  }
  if (!(s > 0.0)) throw ConfigError("the Gevrey order is positive");

  const SampledField field = symbol_field(a, options);
  GammaReport rep;

  if (mode == GammaMode::Derivative) {
    rep.mode = "derivative";
    rep.derivative =
        gevrey_derivative_check(field, omega0, s, options.max_order);
    rep.C = rep.derivative.C;
    rep.rate = rep.derivative.h;
    // A trend needs at least two orders contributing a finite envelope;
    // a symbol whose derivatives all vanish fits with C at order zero
    // and says nothing about shrinking h.
    int active = 0;
    for (const GevreyOrderStat& st : rep.derivative.orders) {
      if (std::isfinite(st.log_envelope)) ++active;
    }
    rep.verdict = rep.derivative.beurling_trend && active >= 2
                      ? "Beurling-trend"
                      : "Roumieu-consistent";
    return rep;
  }

  rep.mode = "stft";
  const Index total = field.size();
  if (total * total > (Index{1} << 26)) {
    throw ConfigError(
        "the phase-space spectrogram would exceed the 2^26-entry guard; "
        "shrink the symbol grid");
  }
  const Spectrogram S = stft(field, Window::gaussian(1.0, 2 * a.dim()));
  const DecayFit fit = stft_decay_fit(S, omega0, s);
  rep.C = fit.C;
  rep.rate = fit.r;
  rep.boundary_level = fit.boundary_level;
  rep.rate_is_lower_bound = fit.r_is_lower_bound;

  // Re-fit the constant along increasing rates: if doubling r costs
  // less than half the worst-case growth e^{(r - r*) u_max}, the
  // estimate is not pinned to one rate.
  const UniformGrid lat = S.lattice_grid();
  const UniformGrid freq = S.frequency_grid();
  const Index nlat = S.lattice_size();
  const Index nbin = S.bin_count();
  Eigen::ArrayXd logw(nlat), u(nbin);
  for_each_index(lat.counts, [&](const MultiIndex& j, Index lin) {
    logw[lin] = omega0.log_evaluate(lat.point(j));
  });
  for_each_index(freq.counts, [&](const MultiIndex& j, Index lin) {
    u[lin] = std::pow(freq.point(j).norm(), 1.0 / s);
  });
  const Real u_max = u.maxCoeff();

  rep.sweep_rate = {fit.r, 1.5 * fit.r, 2.0 * fit.r, 3.0 * fit.r};
  rep.sweep_log_C.assign(rep.sweep_rate.size(),
                         -std::numeric_limits<Real>::infinity());
  for (Index m = 0; m < nlat; ++m) {
    for (Index k = 0; k < nbin; ++k) {
      const Real mag = std::abs(S.field(m * nbin + k));
      if (mag == 0.0) continue;
      const Real z = std::log(mag) - logw[m];
      for (std::size_t i = 0; i < rep.sweep_rate.size(); ++i) {
        rep.sweep_log_C[i] =
            std::max(rep.sweep_log_C[i], z + rep.sweep_rate[i] * u[k]);
      }
    }
  }

  bool trend = fit.r > 0.0;
  for (std::size_t i = 1; i < rep.sweep_rate.size(); ++i) {
    const Real growth = rep.sweep_log_C[i] - rep.sweep_log_C[0];
    const Real cap = 0.5 * (rep.sweep_rate[i] - rep.sweep_rate[0]) * u_max;
    if (growth > cap + 1e-9) trend = false;
  }
  rep.verdict = trend ? "Beurling-trend" : "Roumieu-consistent";
  return rep;
}

nlohmann::json QuantizationInvarianceReport::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < quantizations[i].rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Index c = 0; c < quantizations[i].cols(); ++c) {
        row.push_back(quantizations[i](r, c));
      }
      rows.push_back(std::move(row));
    }
    entries.push_back({{"quantization", std::move(rows)},
                       {"report", reports[i].to_json()}});
  }
  return {{"agree", agree}, {"entries", std::move(entries)}};
}

QuantizationInvarianceReport quantization_invariance_check(
    const Symbol& a, const Weight& omega0, Real s,
    const std::vector<QuantizationSpec>& quantizations, GammaMode mode,
    const GammaOptions& options) {
  if (quantizations.empty()) {
    throw ConfigError("list at least one quantization");
  }
  const UniformGrid pg = UniformGrid::centered(
      2 * a.dim(), options.samples_per_axis, options.half_width);
  QuantizationInvarianceReport out;
  for (const QuantizationSpec& A : quantizations) {
    const Symbol b = change_quantization(a, quantizations.front(), A, &pg);
    out.quantizations.push_back(A.matrix());
    out.reports.push_back(gamma_membership(b, omega0, s, mode, options));
  }
  out.agree = true;
  for (const GammaReport& r : out.reports) {
    if (r.verdict != out.reports.front().verdict) out.agree = false;
  }
  return out;
}

}  // namespace modcalc
