// SPDX-License-Identifier: Apache-2.0
//
// Gevrey-class diagnostics for symbols.  Two finite-grid readings of
// the same class: fit constants in
//
//   |V_Phi a(z, zeta)| <= C omega0(z) e^{-r |zeta|^{1/s}}   (stft mode)
//   |d^n a| <= C h^n (n!)^s omega0 pointwise                (derivative)
//
// and report whether the constants keep improving along a sweep.  A
// finite grid cannot certify membership, so verdicts stay in
// "consistent"/"trend" language and reports carry every fitted
// constant and residual.

#ifndef MODCALC_PDO_GAMMA_HPP
#define MODCALC_PDO_GAMMA_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "modcalc/core/quantization.hpp"
#include "modcalc/pdo/symbol.hpp"
#include "modcalc/weights/analysis.hpp"

namespace modcalc {

enum class GammaMode { Stft, Derivative };

struct GammaOptions {
  // Closed symbols are sampled on a centered phase-space grid with
  // this many points per axis over [-half_width, half_width).
  Index samples_per_axis = 32;
  Real half_width = 8.0;
  // Highest derivative order tested in derivative mode.
  int max_order = 6;
};

struct GammaReport {
  std::string mode;
  std::string verdict;  // "Roumieu-consistent" or "Beurling-trend"
  Real C = 0.0;         // fitted constant at the base rate / order sweep
  Real rate = 0.0;      // stft: fitted r; derivative: fitted h
  // stft mode: spectrogram mass at the frequency boundary relative to
  // its peak; when it is visible the fitted rate only bounds from below.
  Real boundary_level = 0.0;
  bool rate_is_lower_bound = false;
  std::vector<Real> sweep_rate;   // stft mode: swept rates, base first
  std::vector<Real> sweep_log_C;  // log constant each swept rate needs
  GevreyReport derivative;        // derivative mode: per-order envelopes

  nlohmann::json to_json() const;
};

// One signal dimension (the phase-space spectrogram is a 4-d array,
// guarded at 2^26 entries).  Sampled symbols are analyzed on their own
// grid; closed forms on the options grid.
GammaReport gamma_membership(const Symbol& a, const Weight& omega0, Real s,
                             GammaMode mode,
                             const GammaOptions& options = {});

struct QuantizationInvarianceReport {
  bool agree = false;  // all verdicts identical
  std::vector<Eigen::MatrixXd> quantizations;
  std::vector<GammaReport> reports;

  nlohmann::json to_json() const;
};

// Re-expresses a (given in the first listed quantization) in each of
// the others and reruns gamma_membership: the class verdict should not
// depend on the quantization even though the fitted constants do.
QuantizationInvarianceReport quantization_invariance_check(
    const Symbol& a, const Weight& omega0, Real s,
    const std::vector<QuantizationSpec>& quantizations,
    GammaMode mode = GammaMode::Derivative,
    const GammaOptions& options = {});

}  // namespace modcalc

#endif
