// SPDX-License-Identifier: Apache-2.0
//
// Empirical operator-norm ratios: apply an operator to every ensemble
// member and compare modulation norms between a source and a target
// space, optionally over a ladder of grid refinements.

#ifndef MODCALC_HARNESS_OPNORM_HPP
#define MODCALC_HARNESS_OPNORM_HPP

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modcalc/harness/ensemble.hpp"
#include "modcalc/norms/modulation.hpp"
#include "modcalc/pdo/op.hpp"

namespace modcalc {

struct MemberStat {
  int index = -1;
  Real ratio = 0.0;  // NaN when the member was skipped
  Real source_norm = 0.0;
  Real target_norm = 0.0;
  bool skipped = false;
};

struct TrendPoint {
  Index n = 0;  // per-axis sample count of the rung
  Real max_ratio = 0.0;
};

struct RatioReport {
  Real max_ratio = 0.0;
  int argmax = -1;
  std::string argmax_descriptor;
  std::vector<MemberStat> members;
  int skipped = 0;  // members with vanishing source norm
  nlohmann::json grid_meta;
  std::vector<TrendPoint> trend;  // strictly increasing n

  // Relative spread (max - min) / max of the trend max-ratios; zero
  // for trends shorter than two rungs.
  Real trend_drift() const;

  nlohmann::json to_json() const;
  // One row per member: index, ratio, source_norm, target_norm.
  std::string csv() const;
};

// Ratios target_norm(Op_A(a) f) / source_norm(f) for every member; by
// homogeneity this equals the ratio after unit source normalization.
RatioReport op_norm_ratio(const Symbol& a, const QuantizationSpec& A,
                          const ModSpaceSpec& source,
                          const ModSpaceSpec& target, const Ensemble& ens);

// Symbols that must be resampled per rung (e.g. tabulated growth
// multipliers on the induced phase grid) receive the rung's signal grid.
using SymbolFactory = std::function<Symbol(const UniformGrid&)>;

// Reruns op_norm_ratio on centered grids of the given per-axis counts
// (strictly increasing), collecting the max-ratio trend; the returned
// report is the finest rung's, with the trend attached.
RatioReport op_norm_ladder(const SymbolFactory& symbol_for,
                           const QuantizationSpec& A,
                           const ModSpaceSpec& source,
                           const ModSpaceSpec& target,
                           const EnsembleSpec& ens_spec, Real half_width,
                           const std::vector<Index>& ladder);

}  // namespace modcalc

#endif
