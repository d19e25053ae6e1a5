// SPDX-License-Identifier: Apache-2.0
#include "modcalc/harness/opnorm.hpp"

#include <cmath>
#include <limits>

#include "modcalc/core/errors.hpp"

namespace modcalc {

namespace {

nlohmann::json grid_meta_of(const UniformGrid& g) {
  std::vector<Real> steps(g.steps.data(), g.steps.data() + g.dim());
  std::vector<Real> offsets(g.offsets.data(), g.offsets.data() + g.dim());
  return {{"counts", g.counts}, {"steps", steps}, {"offsets", offsets}};
}

}  // namespace

Real RatioReport::trend_drift() const {
  if (trend.size() < 2) return 0.0;
  Real lo = trend.front().max_ratio, hi = trend.front().max_ratio;
  for (const TrendPoint& t : trend) {
    lo = std::min(lo, t.max_ratio);
    hi = std::max(hi, t.max_ratio);
  }
  if (!(hi > 0.0)) return 0.0;
  return (hi - lo) / hi;
}

RatioReport op_norm_ratio(const Symbol& a, const QuantizationSpec& A,
                          const ModSpaceSpec& source,
                          const ModSpaceSpec& target, const Ensemble& ens) {
  const int d = ens.grid.dim();
  if (source.signal_dim() != d || target.signal_dim() != d) {
    throw DimensionError("norm specs must match the ensemble dimension");
  }
  if (a.dim() != d) {
    throw DimensionError("symbol and ensemble signal dimensions differ");
  }
  RatioReport rep;
  rep.grid_meta = grid_meta_of(ens.grid);
  rep.members.reserve(ens.members.size());
  for (size_t i = 0; i < ens.members.size(); ++i) {
    const SampledField& f = ens.members[i];
    MemberStat st;
    st.index = static_cast<int>(i);
    st.source_norm = modulation_norm(f, source);
    if (!(st.source_norm > 0.0)) {
      st.skipped = true;
      st.ratio = std::numeric_limits<Real>::quiet_NaN();
      ++rep.skipped;
      rep.members.push_back(st);
      continue;
    }
    st.target_norm = modulation_norm(apply_op(a, A, f), target);
    st.ratio = st.target_norm / st.source_norm;
    if (rep.argmax < 0 || st.ratio > rep.max_ratio) {
      rep.max_ratio = st.ratio;
      rep.argmax = st.index;
    }
    rep.members.push_back(st);
  }
  if (rep.argmax >= 0) {
    rep.argmax_descriptor = to_string(ens.spec.kind) + "[" +
                            std::to_string(rep.argmax) +
                            "] seed=" + std::to_string(ens.spec.seed);
  }
  return rep;
}

RatioReport op_norm_ladder(const SymbolFactory& symbol_for,
                           const QuantizationSpec& A,
                           const ModSpaceSpec& source,
                           const ModSpaceSpec& target,
                           const EnsembleSpec& ens_spec, Real half_width,
                           const std::vector<Index>& ladder) {
  if (ladder.empty()) throw ConfigError("refinement ladder must be nonempty");
  for (size_t i = 0; i + 1 < ladder.size(); ++i) {
    if (ladder[i + 1] <= ladder[i]) {
      throw ConfigError("refinement ladder counts must strictly increase");
    }
  }
  if (!(half_width > 0.0)) throw ConfigError("half width must be positive");

  const int d = source.signal_dim();
  RatioReport finest;
  std::vector<TrendPoint> trend;
  trend.reserve(ladder.size());
  for (Index n : ladder) {
    if (n < 2) throw ConfigError("ladder rungs need at least two samples");
    const UniformGrid grid = UniformGrid::centered(d, n, half_width);
    const Ensemble ens = make_ensemble(ens_spec, grid);
    finest = op_norm_ratio(symbol_for(grid), A, source, target, ens);
    trend.push_back({n, finest.max_ratio});
  }
  finest.trend = std::move(trend);
  return finest;
}

}  // namespace modcalc
