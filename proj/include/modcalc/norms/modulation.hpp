// SPDX-License-Identifier: Apache-2.0
//
// Modulation-space norms: the mixed norm of the weighted STFT over a
// phase-space basis.

#ifndef MODCALC_NORMS_MODULATION_HPP
#define MODCALC_NORMS_MODULATION_HPP

#include <vector>

#include <json.hpp>

#include "modcalc/norms/mixed_norm.hpp"
#include "modcalc/stft/window.hpp"

namespace modcalc {

// ||f|| = || V_phi f * omega ||_B with B a mixed norm on R^{2d}.
struct ModSpaceSpec {
  Weight weight;       // omega on phase space (2d coordinates)
  MixedNormSpec norm;  // B; its own weight multiplies omega
  Window window;       // phi

  ModSpaceSpec(Weight weight_in, MixedNormSpec norm_in, Window window_in);

  // Position axes inner with exponent p, frequency axes outer with q.
  static ModSpaceSpec lpq1(Exponent p, Exponent q, Weight omega,
                           Window window);
  // Reversed order: frequency inner with q, position outer with p.
  static ModSpaceSpec lpq2(Exponent p, Exponent q, Weight omega,
                           Window window);

  int signal_dim() const { return window.dim(); }

  nlohmann::json to_json() const;
  static ModSpaceSpec from_json(const nlohmann::json& j);
};

Real modulation_norm(const SampledField& f, const ModSpaceSpec& spec);

struct EmbeddingReport {
  Real max_ratio = 0.0;  // max ||f||_2 / ||f||_1 over the members
  int argmax = -1;
  int members = 0;
  int skipped = 0;  // members with vanishing source norm
  std::vector<Real> ratios;

  nlohmann::json to_json() const;
};

// Empirical constant of spec1 -> spec2 over the given members.  The
// hypotheses are enforced first: exponents componentwise nondecreasing
// over a shared basis ordering, and the target weight dominated by the
// source weight on a nested-box scan.
EmbeddingReport embedding_check(const std::vector<SampledField>& members,
                                const ModSpaceSpec& spec1,
                                const ModSpaceSpec& spec2);

}  // namespace modcalc

#endif
