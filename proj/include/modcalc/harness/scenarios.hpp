// SPDX-License-Identifier: Apache-2.0
//
// Named verification scenarios: each one checks its hypotheses with the
// library's own diagnostics, runs an operator-norm refinement study (or
// a two-path kernel check), and grades the outcome.  A failed
// hypothesis makes the scenario inapplicable rather than failed.
// Results reconcile against frozen fixture files keyed by config hash.

#ifndef MODCALC_HARNESS_SCENARIOS_HPP
#define MODCALC_HARNESS_SCENARIOS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "modcalc/harness/opnorm.hpp"
#include "modcalc/pdo/symbol.hpp"
#include "modcalc/weights/weight.hpp"

namespace modcalc {

enum class ScenarioStatus { Pass, Fail, Inapplicable };

std::string to_string(ScenarioStatus status);

struct ScenarioResult {
  std::string scenario;
  ScenarioStatus status = ScenarioStatus::Fail;
  std::string detail;
  RatioReport report;
  nlohmann::json diagnostics;  // hypothesis checks, identity brackets, ...
  nlohmann::json config;       // fully defaulted echo of the input

  // 0 pass, 1 fail, 4 inapplicable.
  int exit_code() const;
  nlohmann::json to_json() const;
};

// Continuity between weighted modulation spaces whose weights differ by
// the symbol's envelope; hypotheses checked with the finite-order
// derivative-envelope diagnostic and the growth classification of both
// weights.  Id "p32".
ScenarioResult scenario_weighted_continuity(const nlohmann::json& config);

// Same study gated on the shrinking-constant (Beurling-side) trend of
// the derivative diagnostic.  Id "p32b".
ScenarioResult scenario_weighted_continuity_beurling(
    const nlohmann::json& config);

// Mixed quasi-norm exponents, possibly below one, over a phase-split
// ordered basis.  Id "opcont3".
ScenarioResult scenario_phase_split_continuity(const nlohmann::json& config);

// Frequency-weighted L2 (Sobolev-type) spaces: (i) the modulation norm
// with weight e^{r|xi|^{1/s}} brackets the direct Plancherel-side norm,
// (ii) a growth multiplier maps r down to r - r0.  Id "sobolev".
ScenarioResult scenario_sobolev_mapping(const nlohmann::json& config);

// Position-weighted L2 mirror of the Sobolev scenario.  Id "weightedl2".
ScenarioResult scenario_weighted_l2_mapping(const nlohmann::json& config);

// Continuity under the four-variable weight compatibility hypothesis,
// with the symbol's (inf,1)-mixed phase-space norm as the second gate.
// Id "propopcont".
ScenarioResult scenario_compatible_weights(const nlohmann::json& config);

// Two-path spectrogram/kernel identity check.  Id "kernel".
ScenarioResult scenario_kernel_identity(const nlohmann::json& config);

// Dispatch by id: p32, p32b, opcont3, sobolev, weightedl2, propopcont,
// kernel.  Unknown ids throw ConfigError.
ScenarioResult run_scenario(const std::string& name,
                            const nlohmann::json& config);

struct KernelProbe {
  Index lattice = 0;  // x index into the spectrogram lattice
  Index bin = 0;      // frequency bin index
  Complex left;       // spectrogram of the operator output
  Complex right;      // kernel-side quadrature
  Real deviation = 0.0;
};

struct KernelCheckReport {
  Real max_deviation = 0.0;  // max |left - right| / max |left|
  Real scale = 0.0;          // max |left| over the probes
  std::vector<KernelProbe> probes;
  nlohmann::json to_json() const;
};

// Evaluates the spectrogram of Op_0(a) f at the probe points two ways:
// through stft(apply_op(...)) and through the adjoint-symbol kernel
// quadrature weighted by omega and v (the weights cancel analytically;
// carrying them exercises the full assembly).  One dimension only, at
// most 64 probes, probes index (lattice, bin) pairs of the unit-stride
// spectrogram.
KernelCheckReport stft_kernel_crosscheck(
    const Symbol& a, const SampledField& f, const Weight& omega,
    const Weight& v, const std::vector<std::pair<Index, Index>>& probes);

// --- report plumbing (report.cpp) ---

// Fixture directory: MODCALC_FIXTURES when set, else "fixtures".
std::string fixture_dir();

// FNV-1a over the canonical dump of a config object.
std::uint64_t config_hash(const nlohmann::json& config);

// Compares the result against <dir>/<scenario>-<hash>.json: writes the
// file on first sight, downgrades the status to Fail on any mismatch,
// and records the fixture state in the diagnostics.
void reconcile_fixture(ScenarioResult& result);

// JSON report plus the per-member CSV next to it.
void write_scenario_files(const ScenarioResult& result,
                          const std::string& json_path,
                          const std::string& csv_path);

}  // namespace modcalc

#endif
