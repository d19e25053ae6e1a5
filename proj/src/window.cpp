// SPDX-License-Identifier: Apache-2.0
#include "modcalc/stft/window.hpp"

#include <cmath>
#include <numbers>

namespace modcalc {

namespace {

Real hermite_poly(int n, Real u) {
  Real h0 = 1.0, h1 = 2.0 * u;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const Real h2 = 2.0 * u * h1 - 2.0 * static_cast<Real>(k) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace

Window Window::gaussian(Real sigma, int dim, bool unit_l2) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian window needs sigma > 0");
  if (dim < 1) throw DimensionError("window dimension must be >= 1");
  Window w;
  w.kind_ = WindowKind::Gaussian;
  w.sigma_ = sigma;
  w.dim_ = dim;
  w.unit_l2_ = unit_l2;
  return w;
}

Window Window::hermite(int order, Real sigma, bool unit_l2) {
  if (!(sigma > 0.0)) throw ConfigError("hermite window needs sigma > 0");
  if (order < 0 || order > 60) {
    throw ConfigError("hermite window order must lie in [0, 60]");
  }
  Window w;
  w.kind_ = WindowKind::Hermite;
  w.sigma_ = sigma;
  w.order_ = order;
  w.dim_ = 1;
  w.unit_l2_ = unit_l2;
  return w;
}

Window Window::tabulated(SampledField samples, bool unit_l2) {
  ensure_finite(samples, "window table");
  if (samples.l2_norm() <= 1e-12) {
    throw InvalidWindowError("window table has (numerically) zero mass");
  }
  if (!samples.grid().basis.is_identity()) {
    throw UnsupportedBasisError("window tables require axis-aligned grids");
  }
  Window w;
  w.kind_ = WindowKind::Tabulated;
  w.dim_ = samples.grid().dim();
  w.unit_l2_ = unit_l2;
  w.table_ = std::move(samples);
  return w;
}

Complex Window::value(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) {
    throw DimensionError("window evaluated at a point of wrong dimension");
  }
  switch (kind_) {
    case WindowKind::Gaussian: {
      const Real norm =
          std::pow(std::numbers::pi * sigma_ * sigma_, -0.25 * dim_);
      return Complex(norm * std::exp(-x.squaredNorm() / (2.0 * sigma_ * sigma_)),
                     0.0);
    }
    case WindowKind::Hermite: {
      const Real u = x[0] / sigma_;
      const Real log_norm =
          -0.5 * (order_ * std::numbers::ln2 + std::lgamma(order_ + 1.0) +
                  0.5 * std::log(std::numbers::pi) + std::log(sigma_));
      return Complex(std::exp(log_norm - 0.5 * u * u) * hermite_poly(order_, u),
                     0.0);
    }
    case WindowKind::Tabulated: {
      // Multilinear interpolation, zero outside the table box.
      const UniformGrid& g = table_->grid();
      const int d = g.dim();
      std::vector<Index> base(d);
      std::vector<Real> frac(d);
      for (int k = 0; k < d; ++k) {
        const Real t = (x[k] - g.offsets[k]) / g.steps[k];
        if (t < -1.0 || t > static_cast<Real>(g.counts[k])) {
          return Complex(0.0, 0.0);
        }
        const Real fl = std::floor(t);
        base[k] = static_cast<Index>(fl);
        frac[k] = t - fl;
      }
      Complex acc(0.0, 0.0);
      for (Index corner = 0; corner < (Index{1} << d); ++corner) {
        Real wgt = 1.0;
        Index lin = 0;
        bool inside = true;
        for (int k = 0; k < d; ++k) {
          const bool hi = (corner >> k) & 1;
          const Index j = base[k] + (hi ? 1 : 0);
          wgt *= hi ? frac[k] : 1.0 - frac[k];
          if (j < 0 || j >= g.counts[k]) {
            inside = false;
            break;
          }
          lin = lin * g.counts[k] + j;
        }
        if (inside && wgt > 0.0) acc += wgt * (*table_)(lin);
      }
      return acc;
    }
  }
  throw ConfigError("unreachable window kind");
}

Real Window::measured_decay(const UniformGrid& grid) const {
  Real sup = 0.0;
  for_each_index(grid.counts, [&](const MultiIndex& j, Index) {
    const Eigen::VectorXd x = grid.coordinates(j);
    sup = std::max(sup, std::abs(value(x)) * std::exp(x.norm() / sigma_));
  });
  return sup;
}

bool Window::same_window(const Window& other) const {
  if (kind_ != other.kind_ || dim_ != other.dim_ ||
      unit_l2_ != other.unit_l2_) {
    return false;
  }
  switch (kind_) {
    case WindowKind::Gaussian:
      return sigma_ == other.sigma_;
    case WindowKind::Hermite:
      return sigma_ == other.sigma_ && order_ == other.order_;
    case WindowKind::Tabulated:
      return table_->grid().same_layout(other.table_->grid()) &&
             (table_->values() == other.table_->values()).all();
  }
  return false;
}

nlohmann::json Window::to_json() const {
  switch (kind_) {
    case WindowKind::Gaussian:
      return {{"kind", "gaussian"},
              {"sigma", sigma_},
              {"dim", dim_},
              {"unit_l2", unit_l2_}};
    case WindowKind::Hermite:
      return {{"kind", "hermite"},
              {"sigma", sigma_},
              {"order", order_},
              {"unit_l2", unit_l2_}};
    case WindowKind::Tabulated:
      return {{"kind", "tabulated"},
              {"unit_l2", unit_l2_},
              {"table", field_to_json(*table_)}};
  }
  throw ConfigError("unreachable window kind");
}

Window Window::from_json(const nlohmann::json& spec) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    const bool unit = spec.value("unit_l2", true);
    if (kind == "gaussian") {
      return gaussian(spec.at("sigma").get<Real>(), spec.value("dim", 1),
                      unit);
    }
    if (kind == "hermite") {
      return hermite(spec.at("order").get<int>(), spec.at("sigma").get<Real>(),
                     unit);
    }
    if (kind == "tabulated") {
      return tabulated(field_from_json(spec.at("table")), unit);
    }
    throw ConfigError("unknown window kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed window spec: ") + e.what());
  }
}

}  // namespace modcalc
