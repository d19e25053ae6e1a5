// SPDX-License-Identifier: Apache-2.0
#include "modcalc/norms/mixed_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "modcalc/core/parallel.hpp"
#include "modcalc/core/rng.hpp"

namespace modcalc {

namespace {

// Alignment of spec.basis against the grid: every spec column must be
// a multiple of a distinct grid axis.  axis_of[k] is that grid axis,
// scale[k] the signed multiple.
void resolve_alignment(const UniformGrid& g, const MixedNormSpec& spec,
                       std::vector<int>& axis_of, Eigen::VectorXd& scale) {
  if (spec.dim() != g.dim()) {
    throw DimensionError("mixed-norm spec dimension must match the field");
  }
  const Eigen::MatrixXd rel =
      g.basis.matrix().partialPivLu().solve(spec.basis.matrix());
  if (!OrderedBasis(rel).is_scaled_permutation(&axis_of, &scale, 1e-9)) {
    throw AlignmentError(
        "mixed-norm basis is not an axis relabeling of the field grid");
  }
}

// Replace `work` (C-ordered over cur) by its L^p reduction along axis
// `pos` with measure dz per sample; removes that axis from cur.
void reduce_axis(Eigen::ArrayXd& work, std::vector<Index>& cur, int pos,
                 const Exponent& p, Real dz) {
  const Index n = cur[pos];
  Index after = 1;
  for (size_t k = pos + 1; k < cur.size(); ++k) after *= cur[k];
  Index before = 1;
  for (int k = 0; k < pos; ++k) before *= cur[k];
  // Each output entry is an ordered serial sum over its own fiber, so
  // the result does not depend on the worker partition.
  Eigen::ArrayXd out(before * after);
  parallel_for(before * after, [&](Index i0, Index i1) {
    for (Index i = i0; i < i1; ++i) {
      const Index base = (i / after) * n * after + i % after;
      Real acc = 0.0;
      if (p.finite()) {
        const Real pe = p.value();
        for (Index t = 0; t < n; ++t) {
          acc += std::pow(work[base + t * after], pe);
        }
        acc = std::pow(acc * dz, 1.0 / pe);
      } else {
        for (Index t = 0; t < n; ++t) {
          acc = std::max(acc, work[base + t * after]);
        }
      }
      out[i] = acc;
    }
  });
  work.swap(out);
  cur.erase(cur.begin() + pos);
}

Real inductive_norm(const SampledField& f, const MixedNormSpec& spec,
                    bool counting) {
  const UniformGrid& g = f.grid();
  const int d = g.dim();
  std::vector<int> axis_of;
  Eigen::VectorXd scale;
  resolve_alignment(g, spec, axis_of, scale);
  ensure_finite(f, "mixed-norm input");

  Eigen::ArrayXd work(f.size());
  parallel_for(f.size(), [&](Index i0, Index i1) {
    MultiIndex j(d);
    for (Index lin = i0; lin < i1; ++lin) {
      unravel_index(g.counts, lin, j);
      work[lin] = std::abs(f(lin)) *
                  std::exp(spec.weight.log_evaluate(g.point(j)));
    }
  });

  std::vector<Index> cur = g.counts;
  std::vector<int> remaining(d);
  for (int k = 0; k < d; ++k) remaining[k] = k;
  for (int k = 0; k < d; ++k) {
    const int axis = axis_of[k];
    const int pos = static_cast<int>(
        std::find(remaining.begin(), remaining.end(), axis) -
        remaining.begin());
    const Real dz =
        counting ? 1.0 : g.steps[axis] / std::abs(scale[k]);
    reduce_axis(work, cur, pos, spec.exponents[k], dz);
    remaining.erase(remaining.begin() + pos);
  }
  return work[0];
}

}  // namespace

Exponent::Exponent(Real p) : p_(p) {
  if (!(p > 0.0)) {
    throw InvalidExponentError("exponents must lie in (0, inf]");
  }
}

Exponent Exponent::inf() {
  return Exponent(std::numeric_limits<Real>::infinity());
}

nlohmann::json Exponent::to_json() const {
  if (finite()) return p_;
  return "inf";
}

Exponent Exponent::from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return inf();
    throw InvalidExponentError("unknown exponent symbol: " +
                               j.get<std::string>());
  }
  if (!j.is_number()) {
    throw InvalidExponentError("exponent must be a number or \"inf\"");
  }
  return Exponent(j.get<Real>());
}

Exponent conjugate_exponent(const Exponent& p) {
  if (!p.finite()) return Exponent(1.0);
  if (p.value() <= 1.0) return Exponent::inf();
  return Exponent(p.value() / (p.value() - 1.0));
}

MixedNormSpec::MixedNormSpec(OrderedBasis basis_in,
                             std::vector<Exponent> exponents_in,
                             Weight weight_in)
    : basis(std::move(basis_in)),
      exponents(std::move(exponents_in)),
      weight(std::move(weight_in)) {
  if (static_cast<int>(exponents.size()) != basis.dim()) {
    throw DimensionError("one exponent per basis column required");
  }
  if (weight.dim() != basis.dim()) {
    throw DimensionError("mixed-norm weight dimension mismatch");
  }
}

MixedNormSpec MixedNormSpec::flat(int dim, std::vector<Exponent> exponents) {
  return MixedNormSpec(OrderedBasis::identity(dim), std::move(exponents),
                       Weight::one(dim));
}

Real MixedNormSpec::quasi_order() const {
  Real r = 1.0;
  for (const Exponent& p : exponents) r = std::min(r, p.value());
  return r;
}

nlohmann::json MixedNormSpec::to_json() const {
  nlohmann::json exps = nlohmann::json::array();
  for (const Exponent& p : exponents) exps.push_back(p.to_json());
  nlohmann::json b;
  if (basis.is_identity()) {
    b = "identity";
  } else {
    b = nlohmann::json::array();
    for (int r = 0; r < basis.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < basis.dim(); ++c) row.push_back(basis.matrix()(r, c));
      b.push_back(std::move(row));
    }
  }
  return {{"exponents", std::move(exps)},
          {"basis", std::move(b)},
          {"weight", weight.to_json()}};
}

MixedNormSpec MixedNormSpec::from_json(const nlohmann::json& j) {
  try {
    std::vector<Exponent> exps;
    for (const auto& e : j.at("exponents")) exps.push_back(Exponent::from_json(e));
    const int d = static_cast<int>(exps.size());
    OrderedBasis basis = OrderedBasis::identity(std::max(d, 1));
    const auto& b = j.at("basis");
    if (b.is_string()) {
      if (b.get<std::string>() != "identity") {
        throw ConfigError("unknown basis symbol: " + b.get<std::string>());
      }
    } else {
      Eigen::MatrixXd m(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = b.at(r).at(c).get<Real>();
      basis = OrderedBasis(m);
    }
    return MixedNormSpec(std::move(basis), std::move(exps),
                         Weight::from_json(j.at("weight")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed mixed-norm spec: ") + e.what());
  }
}

Real mixed_norm(const SampledField& f, const MixedNormSpec& spec) {
  return inductive_norm(f, spec, false);
}

Real discrete_mixed_norm(const SampledField& a, const MixedNormSpec& spec) {
  for (int k = 0; k < a.grid().dim(); ++k) {
    if (std::abs(a.grid().steps[k] - 1.0) > 1e-12) {
      throw AlignmentError("sequences live on the unit-step lattice");
    }
  }
  return inductive_norm(a, spec, true);
}

nlohmann::json QbfAxiomReport::to_json() const {
  return {{"translation_ratio", translation_ratio},
          {"solidity_ratio", solidity_ratio},
          {"subadditivity_ratio", subadditivity_ratio},
          {"quasi_order", quasi_order},
          {"trials", trials},
          {"seed", seed},
          {"pass", pass}};
}

QbfAxiomReport qbf_axiom_check(const MixedNormSpec& spec, const Weight& v,
                               const UniformGrid& grid, int trials,
                               std::uint64_t seed) {
  if (trials < 100) {
    throw ConfigError("qbf_axiom_check needs at least 100 trials");
  }
  if (v.dim() != grid.dim()) {
    throw DimensionError("moderating weight dimension mismatch");
  }
  const int d = grid.dim();
  Rng rng(seed);

  // Fields supported on the middle half of the box, so whole-cell
  // shifts up to a quarter of the box relabel samples exactly.
  std::vector<Index> lo(d), hi(d), margin(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = grid.counts[k] / 4;
    hi[k] = grid.counts[k] - grid.counts[k] / 4;
    margin[k] = grid.counts[k] / 4;
  }
  const auto random_field = [&] {
    SampledField f(grid);
    for_each_index(grid.counts, [&](const MultiIndex& j, Index lin) {
      for (int k = 0; k < d; ++k) {
        if (j[k] < lo[k] || j[k] >= hi[k]) return;
      }
      f(lin) = Complex(rng.normal(), rng.normal());
    });
    return f;
  };
  const auto shifted = [&](const SampledField& f, const MultiIndex& m) {
    SampledField out(grid);
    for_each_index(grid.counts, [&](const MultiIndex& j, Index lin) {
      MultiIndex src(d);
      for (int k = 0; k < d; ++k) {
        src[k] = j[k] - m[k];
        if (src[k] < 0 || src[k] >= grid.counts[k]) return;
      }
      out(lin) = f.at(src);
    });
    return out;
  };

  QbfAxiomReport rep;
  rep.quasi_order = spec.quasi_order();
  rep.trials = trials;
  rep.seed = seed;
  const Real r = rep.quasi_order;
  for (int t = 0; t < trials; ++t) {
    const SampledField f = random_field();
    const Real nf = mixed_norm(f, spec);
    if (nf <= 0.0) continue;

    MultiIndex m(d);
    Eigen::VectorXd coord_shift(d);
    for (int k = 0; k < d; ++k) {
      m[k] = rng.integer(-margin[k], margin[k]);
      coord_shift[k] = static_cast<Real>(m[k]) * grid.steps[k];
    }
    const Eigen::VectorXd x = grid.basis.matrix() * coord_shift;
    const Real nt = mixed_norm(shifted(f, m), spec);
    rep.translation_ratio =
        std::max(rep.translation_ratio, nt / (v.evaluate(x) * nf));

    SampledField damped(grid);
    for (Index i = 0; i < f.size(); ++i) {
      damped(i) = f(i) * rng.uniform() *
                  std::exp(Complex(0.0, rng.uniform(0.0, 6.28)));
    }
    rep.solidity_ratio =
        std::max(rep.solidity_ratio, mixed_norm(damped, spec) / nf);

    const SampledField g = random_field();
    const Real ng = mixed_norm(g, spec);
    if (ng > 0.0) {
      SampledField sum(grid, f.values() + g.values());
      rep.subadditivity_ratio = std::max(
          rep.subadditivity_ratio,
          std::pow(mixed_norm(sum, spec), r) /
              (std::pow(nf, r) + std::pow(ng, r)));
    }
  }
  const Real cap = 1.0 + 1e-9;
  rep.pass = rep.translation_ratio <= cap && rep.solidity_ratio <= cap &&
             rep.subadditivity_ratio <= cap;
  return rep;
}

}  // namespace modcalc
