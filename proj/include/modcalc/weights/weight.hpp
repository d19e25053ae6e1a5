// SPDX-License-Identifier: Apache-2.0
//
// Weight functions: strictly positive, locally bounded functions used
// to weight norms and symbol estimates.  Evaluation happens in log
// space so that exponential families compose without overflow; the
// plain evaluate() exponentiates at the end.

#ifndef MODCALC_WEIGHTS_WEIGHT_HPP
#define MODCALC_WEIGHTS_WEIGHT_HPP

#include <memory>

#include <json.hpp>

#include "modcalc/core/field.hpp"

namespace modcalc {

// A nonpositive value where a weight table must be positive.
struct InvalidWeightError : Error {
  using Error::Error;
};

class Weight {
 public:
  Weight() = default;

  int dim() const;
  bool valid() const { return impl_ != nullptr; }

  Real log_evaluate(const Eigen::VectorXd& x) const;
  Real evaluate(const Eigen::VectorXd& x) const {
    return std::exp(log_evaluate(x));
  }
  // 1-d convenience.
  Real evaluate1(Real x) const {
    return evaluate(Eigen::VectorXd::Constant(1, x));
  }

  nlohmann::json to_json() const;
  static Weight from_json(const nlohmann::json& spec);

  // --- constructors for the shipped families ---
  static Weight one(int dim);
  // (1 + |x|^2)^{t/2}
  static Weight polynomial(Real t, int dim);
  // e^{r |x|^{1/s}}, s >= 1
  static Weight exp_power(Real r, Real s, int dim);
  // pointwise product of same-dimension weights
  static Weight product(std::vector<Weight> factors);
  // w_x(x) * w_xi(xi) on the concatenated space
  static Weight tensor_split(Weight w_x, Weight w_xi);
  // positive real table with multilinear interpolation, clamped to the
  // nearest cell center outside the grid
  static Weight tabulated(const SampledField& table);
  // base(x)^exponent (exponent may be negative)
  static Weight power(Weight base, Real exponent);
  // evaluate base on the selected coordinates of a larger space
  static Weight lift(Weight base, std::vector<int> coords, int dim);

  struct Impl;

 private:
  explicit Weight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend Weight wrap_weight(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Internal hook for the implementation nodes in weight.cpp.
Weight wrap_weight(std::shared_ptr<const Weight::Impl> impl);

}  // namespace modcalc

#endif
