// SPDX-License-Identifier: Apache-2.0
#include "modcalc/norms/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "modcalc/stft/stft.hpp"

namespace modcalc {

namespace {

std::vector<Exponent> split_exponents(int d, const Exponent& inner,
                                      const Exponent& outer) {
  std::vector<Exponent> e;
  e.reserve(2 * d);
  for (int k = 0; k < d; ++k) e.push_back(inner);
  for (int k = 0; k < d; ++k) e.push_back(outer);
  return e;
}

// Largest log(w2/w1) over the lattice scan of [-half, half]^{dim}.
Real scan_log_ratio(const Weight& w1, const Weight& w2, int dim, Real half,
                    int per_axis) {
  std::vector<Index> counts(dim, per_axis);
  Real sup = -std::numeric_limits<Real>::infinity();
  Eigen::VectorXd x(dim);
  for_each_index(counts, [&](const MultiIndex& j, Index) {
    for (int k = 0; k < dim; ++k) {
      x[k] = -half + 2.0 * half * static_cast<Real>(j[k]) /
                         static_cast<Real>(per_axis - 1);
    }
    sup = std::max(sup, w2.log_evaluate(x) - w1.log_evaluate(x));
  });
  return sup;
}

}  // namespace

ModSpaceSpec::ModSpaceSpec(Weight weight_in, MixedNormSpec norm_in,
                           Window window_in)
    : weight(std::move(weight_in)),
      norm(std::move(norm_in)),
      window(std::move(window_in)) {
  const int d2 = 2 * window.dim();
  if (weight.dim() != d2 || norm.dim() != d2) {
    throw DimensionError(
        "modulation weight and norm live on phase space (twice the "
        "window dimension)");
  }
}

ModSpaceSpec ModSpaceSpec::lpq1(Exponent p, Exponent q, Weight omega,
                                Window window) {
  const int d = window.dim();
  MixedNormSpec norm(OrderedBasis::identity(2 * d), split_exponents(d, p, q),
                     Weight::one(2 * d));
  return ModSpaceSpec(std::move(omega), std::move(norm), std::move(window));
}

ModSpaceSpec ModSpaceSpec::lpq2(Exponent p, Exponent q, Weight omega,
                                Window window) {
  const int d = window.dim();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (int k = 0; k < d; ++k) {
    basis(d + k, k) = 1.0;  // inner columns: frequency axes
    basis(k, d + k) = 1.0;  // outer columns: position axes
  }
  MixedNormSpec norm(OrderedBasis(basis), split_exponents(d, q, p),
                     Weight::one(2 * d));
  return ModSpaceSpec(std::move(omega), std::move(norm), std::move(window));
}

nlohmann::json ModSpaceSpec::to_json() const {
  return {{"weight", weight.to_json()},
          {"norm", norm.to_json()},
          {"window", window.to_json()}};
}

ModSpaceSpec ModSpaceSpec::from_json(const nlohmann::json& j) {
  try {
    return ModSpaceSpec(Weight::from_json(j.at("weight")),
                        MixedNormSpec::from_json(j.at("norm")),
                        Window::from_json(j.at("window")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed modulation spec: ") + e.what());
  }
}

Real modulation_norm(const SampledField& f, const ModSpaceSpec& spec) {
  if (f.grid().dim() != spec.signal_dim()) {
    throw DimensionError("signal dimension does not match the window");
  }
  const Spectrogram s = stft(f, spec.window);
  MixedNormSpec weighted(spec.norm.basis, spec.norm.exponents,
                         Weight::product({spec.weight, spec.norm.weight}));
  return mixed_norm(s.field, weighted);
}

nlohmann::json EmbeddingReport::to_json() const {
  return {{"max_ratio", max_ratio},
          {"argmax", argmax},
          {"members", members},
          {"skipped", skipped},
          {"ratios", ratios}};
}

EmbeddingReport embedding_check(const std::vector<SampledField>& members,
                                const ModSpaceSpec& spec1,
                                const ModSpaceSpec& spec2) {
  if (spec1.norm.dim() != spec2.norm.dim() ||
      spec1.signal_dim() != spec2.signal_dim()) {
    throw DimensionError("embedding compares spaces over the same phase space");
  }
  const Eigen::MatrixXd diff =
      spec1.norm.basis.matrix() - spec2.norm.basis.matrix();
  if (diff.cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("embedding requires a shared basis ordering");
  }
  for (size_t k = 0; k < spec1.norm.exponents.size(); ++k) {
    if (!(spec1.norm.exponents[k] <= spec2.norm.exponents[k])) {
      throw ConfigError("embedding requires componentwise nondecreasing "
                        "exponents");
    }
  }
  // Domination scan of the effective weights: the sup of log(w2/w1)
  // over nested boxes must not keep climbing as the box grows.
  const Weight w1 = Weight::product({spec1.weight, spec1.norm.weight});
  const Weight w2 = Weight::product({spec2.weight, spec2.norm.weight});
  const int d2 = spec1.norm.dim();
  const int per_axis = d2 <= 4 ? 17 : 7;
  const Real near = scan_log_ratio(w1, w2, d2, 8.0, per_axis);
  const Real far = scan_log_ratio(w1, w2, d2, 32.0, per_axis);
  if (far > near + 0.5 * std::log(4.0)) {
    throw ConfigError("weight scan: target weight is not dominated by "
                      "the source weight");
  }

  EmbeddingReport rep;
  rep.members = static_cast<int>(members.size());
  for (size_t i = 0; i < members.size(); ++i) {
    const Real n1 = modulation_norm(members[i], spec1);
    const Real n2 = modulation_norm(members[i], spec2);
    if (n1 <= 0.0 || n2 <= 0.0) {
      ++rep.skipped;
      rep.ratios.push_back(0.0);
      continue;
    }
    const Real ratio = n2 / n1;
    rep.ratios.push_back(ratio);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax = static_cast<int>(i);
    }
  }
  return rep;
}

}  // namespace modcalc
