// SPDX-License-Identifier: Apache-2.0
//
// Mixed (quasi-)norms over ordered bases.  The norm is the inductive
// one: weight the samples, take the L^{p_1} norm along the first basis
// direction, then L^{p_2} along the second, and so on, with each
// integral realized as a midpoint-rule power sum (max for p = inf).

#ifndef MODCALC_NORMS_MIXED_NORM_HPP
#define MODCALC_NORMS_MIXED_NORM_HPP

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "modcalc/core/field.hpp"
#include "modcalc/weights/weight.hpp"

namespace modcalc {

// A Lebesgue exponent in (0, inf].  Infinity is an explicit state, not
// a large float; json form is a number or the string "inf".
class Exponent {
 public:
  Exponent(Real p);  // NOLINT: implicit by design (Exponent e = 2.0)
  static Exponent inf();

  bool finite() const { return std::isfinite(p_); }
  // The numeric value; +infinity in the inf state.
  Real value() const { return p_; }

  bool operator==(const Exponent& o) const { return p_ == o.p_; }
  bool operator<=(const Exponent& o) const { return p_ <= o.p_; }

  nlohmann::json to_json() const;
  static Exponent from_json(const nlohmann::json& j);

 private:
  Real p_;
};

// inf for p in (0,1], p/(p-1) for p in (1,inf), 1 for p = inf.
Exponent conjugate_exponent(const Exponent& p);

struct MixedNormSpec {
  OrderedBasis basis;
  std::vector<Exponent> exponents;  // one per basis column, inner first
  Weight weight;

  MixedNormSpec(OrderedBasis basis_in, std::vector<Exponent> exponents_in,
                Weight weight_in);
  // Identity basis, unit weight.
  static MixedNormSpec flat(int dim, std::vector<Exponent> exponents);

  int dim() const { return basis.dim(); }
  // r = min(1, p_1, ..., p_d), the quasi-norm order.
  Real quasi_order() const;

  nlohmann::json to_json() const;
  static MixedNormSpec from_json(const nlohmann::json& j);
};

// The inductive mixed norm of f.  The grid must be aligned with the
// spec basis: every basis column a multiple of a distinct grid axis
// (this covers permuted and rescaled orderings).  The weight is
// evaluated at physical grid points.
Real mixed_norm(const SampledField& f, const MixedNormSpec& spec);

// Norm of a sequence on the lattice of spec.basis.  `a`'s grid carries
// the lattice layout and must have unit steps in basis coordinates;
// entries are counted (no cell measure), which equals the continuous
// mixed norm of the associated step function.
Real discrete_mixed_norm(const SampledField& a, const MixedNormSpec& spec);

// Randomized quasi-Banach function-space axiom diagnostics for a
// mixed-norm instance: translation bound against the moderating weight
// v, solidity, and the r-power triangle inequality.  Constants are
// reported per axiom.
struct QbfAxiomReport {
  Real translation_ratio = 0.0;   // max ||f(.-x)|| / (v(x) ||f||)
  Real solidity_ratio = 0.0;      // max ||f|| / ||g|| over |f| <= |g|
  Real subadditivity_ratio = 0.0; // max ||f+g||^r / (||f||^r + ||g||^r)
  Real quasi_order = 1.0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;  // all ratios <= 1 + 1e-9

  nlohmann::json to_json() const;
};

// Shifts move by whole lattice cells only, so the translation constant
// carries no interpolation error.  Requires trials >= 100.
QbfAxiomReport qbf_axiom_check(const MixedNormSpec& spec, const Weight& v,
                               const UniformGrid& grid, int trials,
                               std::uint64_t seed);

}  // namespace modcalc

#endif
