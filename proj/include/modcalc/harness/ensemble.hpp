// SPDX-License-Identifier: Apache-2.0
//
// Seeded test-signal ensembles for empirical operator-norm estimation.
// Parameter draws depend only on (kind, count, seed), never on the
// grid, so the same spec resampled on a finer grid yields the same
// underlying functions; extending the count keeps earlier members.

#ifndef MODCALC_HARNESS_ENSEMBLE_HPP
#define MODCALC_HARNESS_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "modcalc/core/field.hpp"

namespace modcalc {

enum class EnsembleKind { GaussianChirps, HermiteMix, GaborCloud };

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& name);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::GaussianChirps;
  int count = 16;
  std::uint64_t seed = 1;

  // GaussianChirps / GaborCloud draw boxes.
  Real center_range = 4.0;      // |center coordinate| bound
  Real modulation_range = 3.0;  // |frequency offset| bound
  Real chirp_range = 0.3;       // |quadratic phase coefficient| bound

  int max_order = 4;  // HermiteMix: mixes orders 0..max_order
  int atoms = 4;      // GaborCloud: atoms per member

  nlohmann::json to_json() const;
  static EnsembleSpec from_json(const nlohmann::json& j);
};

struct Ensemble {
  EnsembleSpec spec;
  UniformGrid grid;
  std::vector<SampledField> members;
};

// Deterministic: the same (spec, grid) reproduces members bit for bit.
Ensemble make_ensemble(const EnsembleSpec& spec, const UniformGrid& grid);

}  // namespace modcalc

#endif
