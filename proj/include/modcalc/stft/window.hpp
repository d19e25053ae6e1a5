// SPDX-License-Identifier: Apache-2.0
//
// Analysis/synthesis windows.  Gaussian and Hermite kinds evaluate in
// closed form at arbitrary points; tabulated windows interpolate their
// sample grid and vanish outside it.  The unit-l2 flag requests
// normalization against the discrete l2 norm measured on the lattice
// the transform actually uses, so energy identities hold exactly at
// the sampled level.

#ifndef MODCALC_STFT_WINDOW_HPP
#define MODCALC_STFT_WINDOW_HPP

#include <optional>

#include <json.hpp>

#include "modcalc/core/field.hpp"

namespace modcalc {

enum class WindowKind { Gaussian, Hermite, Tabulated };

class Window {
 public:
  // phi(x) = (pi sigma^2)^{-d/4} e^{-|x|^2 / (2 sigma^2)}
  static Window gaussian(Real sigma, int dim, bool unit_l2 = true);
  // One-dimensional Hermite function of the given order and width,
  // continuous-normalized via the physicists' recurrence.
  static Window hermite(int order, Real sigma, bool unit_l2 = true);
  static Window tabulated(SampledField samples, bool unit_l2 = true);

  WindowKind kind() const { return kind_; }
  int dim() const { return dim_; }
  Real sigma() const { return sigma_; }
  int order() const { return order_; }
  bool unit_l2() const { return unit_l2_; }
  const std::optional<SampledField>& table() const { return table_; }

  // Raw (un-normalized) value at a physical point.
  Complex value(const Eigen::VectorXd& x) const;
  Complex value1(Real x) const {
    return value(Eigen::VectorXd::Constant(1, x));
  }

  // Decay diagnostic: sup over the grid of |phi(x)| e^{|x|/sigma}.
  Real measured_decay(const UniformGrid& grid) const;

  bool same_window(const Window& other) const;

  nlohmann::json to_json() const;
  static Window from_json(const nlohmann::json& spec);

 private:
  Window() = default;
  WindowKind kind_ = WindowKind::Gaussian;
  int dim_ = 1;
  Real sigma_ = 1.0;
  int order_ = 0;
  bool unit_l2_ = true;
  std::optional<SampledField> table_;
};

}  // namespace modcalc

#endif
