// SPDX-License-Identifier: Apache-2.0
#include "modcalc/weights/weight.hpp"

#include <cmath>

namespace modcalc {

struct Weight::Impl {
  virtual ~Impl() = default;
  virtual int dim() const = 0;
  virtual Real log_at(const Eigen::VectorXd& x) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

namespace {

using ImplPtr = std::shared_ptr<const Weight::Impl>;

void check_dim(const Eigen::VectorXd& x, int d, const char* what) {
  if (static_cast<int>(x.size()) != d) {
    throw DimensionError(std::string(what) +
                         ": point dimension does not match weight");
  }
}

struct OneForm final : Weight::Impl {
  int d;
  explicit OneForm(int d_in) : d(d_in) {}
  int dim() const override { return d; }
  Real log_at(const Eigen::VectorXd& x) const override {
    check_dim(x, d, "one");
    return 0.0;
  }
  nlohmann::json to_json() const override {
    return {{"form", "one"}, {"dim", d}};
  }
};

struct PolynomialForm final : Weight::Impl {
  Real t;
  int d;
  PolynomialForm(Real t_in, int d_in) : t(t_in), d(d_in) {}
  int dim() const override { return d; }
  Real log_at(const Eigen::VectorXd& x) const override {
    check_dim(x, d, "polynomial");
    return 0.5 * t * std::log1p(x.squaredNorm());
  }
  nlohmann::json to_json() const override {
    return {{"form", "polynomial"}, {"t", t}, {"dim", d}};
  }
};

struct ExpPowerForm final : Weight::Impl {
  Real r, s;
  int d;
  ExpPowerForm(Real r_in, Real s_in, int d_in) : r(r_in), s(s_in), d(d_in) {
    if (s < 1.0) throw ConfigError("exp_power requires s >= 1");
  }
  int dim() const override { return d; }
  Real log_at(const Eigen::VectorXd& x) const override {
    check_dim(x, d, "exp_power");
    return r * std::pow(x.norm(), 1.0 / s);
  }
  nlohmann::json to_json() const override {
    return {{"form", "exp_power"}, {"r", r}, {"s", s}, {"dim", d}};
  }
};

struct ProductForm final : Weight::Impl {
  std::vector<Weight> factors;
  explicit ProductForm(std::vector<Weight> f) : factors(std::move(f)) {
    if (factors.empty()) throw ConfigError("product weight needs factors");
    for (const auto& w : factors) {
      if (!w.valid() || w.dim() != factors.front().dim()) {
        throw DimensionError("product weight factors must share dimension");
      }
    }
  }
  int dim() const override { return factors.front().dim(); }
  Real log_at(const Eigen::VectorXd& x) const override {
    Real acc = 0.0;
    for (const auto& w : factors) acc += w.log_evaluate(x);
    return acc;
  }
  nlohmann::json to_json() const override {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& w : factors) f.push_back(w.to_json());
    return {{"form", "product"}, {"factors", std::move(f)}};
  }
};

struct TensorSplitForm final : Weight::Impl {
  Weight wx, wxi;
  TensorSplitForm(Weight a, Weight b) : wx(std::move(a)), wxi(std::move(b)) {
    if (!wx.valid() || !wxi.valid()) {
      throw ConfigError("tensor_split weight needs two factors");
    }
  }
  int dim() const override { return wx.dim() + wxi.dim(); }
  Real log_at(const Eigen::VectorXd& x) const override {
    check_dim(x, dim(), "tensor_split");
    return wx.log_evaluate(x.head(wx.dim())) +
           wxi.log_evaluate(x.tail(wxi.dim()));
  }
  nlohmann::json to_json() const override {
    return {{"form", "tensor_split"},
            {"x", wx.to_json()},
            {"xi", wxi.to_json()}};
  }
};

struct TabulatedForm final : Weight::Impl {
  UniformGrid grid;
  Eigen::ArrayXd table;  // positive values, C-ordered like SampledField

  explicit TabulatedForm(const SampledField& f)
      : grid(f.grid()), table(f.size()) {
    if (!grid.basis.is_identity(1e-14)) {
      throw UnsupportedBasisError("tabulated weights need an identity basis");
    }
    for (Index i = 0; i < f.size(); ++i) {
      const Complex v = f(i);
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real()))) {
        throw InvalidWeightError("tabulated weight has complex entries");
      }
      if (!(v.real() > 0.0) || !std::isfinite(v.real())) {
        throw InvalidWeightError("tabulated weight entries must be positive");
      }
      table[i] = v.real();
    }
  }

  int dim() const override { return grid.dim(); }

  Real log_at(const Eigen::VectorXd& x) const override {
    check_dim(x, dim(), "tabulated");
    const int d = dim();
    // Per-axis lower cell index and interpolation fraction, clamped so
    // queries outside the table take the boundary value.
    std::vector<Index> lo(d);
    std::vector<Real> frac(d);
    for (int k = 0; k < d; ++k) {
      const Real u = (x[k] - grid.offsets[k]) / grid.steps[k];
      if (u <= 0.0 || grid.counts[k] == 1) {
        lo[k] = 0;
        frac[k] = 0.0;
      } else if (u >= static_cast<Real>(grid.counts[k] - 1)) {
        lo[k] = grid.counts[k] - 1;
        frac[k] = 0.0;
      } else {
        lo[k] = static_cast<Index>(u);
        frac[k] = u - static_cast<Real>(lo[k]);
      }
    }
    Real acc = 0.0;
    MultiIndex j(d);
    for (unsigned corner = 0; corner < (1u << d); ++corner) {
      Real w = 1.0;
      for (int k = 0; k < d; ++k) {
        if (corner & (1u << k)) {
          w *= frac[k];
          j[k] = std::min(lo[k] + 1, grid.counts[k] - 1);
        } else {
          w *= 1.0 - frac[k];
          j[k] = lo[k];
        }
      }
      if (w != 0.0) acc += w * table[linear_index(grid.counts, j)];
    }
    return std::log(acc);
  }

  nlohmann::json to_json() const override {
    Eigen::ArrayXcd values = table.cast<Complex>();
    SampledField f(grid, std::move(values));
    return {{"form", "tabulated"}, {"field", field_to_json(f)}};
  }
};

struct PowerForm final : Weight::Impl {
  Weight base;
  Real exponent;
  PowerForm(Weight b, Real e) : base(std::move(b)), exponent(e) {
    if (!base.valid()) throw ConfigError("power weight needs a base");
  }
  int dim() const override { return base.dim(); }
  Real log_at(const Eigen::VectorXd& x) const override {
    return exponent * base.log_evaluate(x);
  }
  nlohmann::json to_json() const override {
    return {{"form", "power"},
            {"base", base.to_json()},
            {"exponent", exponent}};
  }
};

struct LiftForm final : Weight::Impl {
  Weight base;
  std::vector<int> coords;
  int d;
  LiftForm(Weight b, std::vector<int> c, int d_in)
      : base(std::move(b)), coords(std::move(c)), d(d_in) {
    if (!base.valid()) throw ConfigError("lift weight needs a base");
    if (static_cast<int>(coords.size()) != base.dim()) {
      throw DimensionError("lift coords must match the base dimension");
    }
    for (int k : coords) {
      if (k < 0 || k >= d) throw DimensionError("lift coord out of range");
    }
  }
  int dim() const override { return d; }
  Real log_at(const Eigen::VectorXd& x) const override {
    check_dim(x, d, "lift");
    Eigen::VectorXd sub(coords.size());
    for (size_t k = 0; k < coords.size(); ++k) sub[k] = x[coords[k]];
    return base.log_evaluate(sub);
  }
  nlohmann::json to_json() const override {
    return {{"form", "lift"},
            {"base", base.to_json()},
            {"coords", coords},
            {"dim", d}};
  }
};

template <typename F, typename... Args>
Weight make_weight(Args&&... args) {
  return wrap_weight(std::make_shared<const F>(std::forward<Args>(args)...));
}

}  // namespace

Weight wrap_weight(std::shared_ptr<const Weight::Impl> impl) {
  return Weight(std::move(impl));
}

int Weight::dim() const {
  if (!impl_) throw ConfigError("empty weight");
  return impl_->dim();
}

Real Weight::log_evaluate(const Eigen::VectorXd& x) const {
  if (!impl_) throw ConfigError("empty weight");
  return impl_->log_at(x);
}

nlohmann::json Weight::to_json() const {
  if (!impl_) throw ConfigError("empty weight");
  return impl_->to_json();
}

Weight Weight::one(int dim) { return make_weight<OneForm>(dim); }

Weight Weight::polynomial(Real t, int dim) {
  return make_weight<PolynomialForm>(t, dim);
}

Weight Weight::exp_power(Real r, Real s, int dim) {
  return make_weight<ExpPowerForm>(r, s, dim);
}

Weight Weight::product(std::vector<Weight> factors) {
  return make_weight<ProductForm>(std::move(factors));
}

Weight Weight::tensor_split(Weight w_x, Weight w_xi) {
  return make_weight<TensorSplitForm>(std::move(w_x), std::move(w_xi));
}

Weight Weight::tabulated(const SampledField& table) {
  return make_weight<TabulatedForm>(table);
}

Weight Weight::power(Weight base, Real exponent) {
  return make_weight<PowerForm>(std::move(base), exponent);
}

Weight Weight::lift(Weight base, std::vector<int> coords, int dim) {
  return make_weight<LiftForm>(std::move(base), std::move(coords), dim);
}

Weight Weight::from_json(const nlohmann::json& spec) {
  try {
    const std::string form = spec.at("form").get<std::string>();
    if (form == "one") return one(spec.at("dim").get<int>());
    if (form == "polynomial") {
      return polynomial(spec.at("t").get<Real>(), spec.at("dim").get<int>());
    }
    if (form == "exp_power") {
      return exp_power(spec.at("r").get<Real>(), spec.at("s").get<Real>(),
                       spec.at("dim").get<int>());
    }
    if (form == "product") {
      std::vector<Weight> factors;
      for (const auto& f : spec.at("factors")) factors.push_back(from_json(f));
      return product(std::move(factors));
    }
    if (form == "tensor_split") {
      return tensor_split(from_json(spec.at("x")), from_json(spec.at("xi")));
    }
    if (form == "tabulated") {
      return tabulated(field_from_json(spec.at("field")));
    }
    if (form == "power") {
      return power(from_json(spec.at("base")), spec.at("exponent").get<Real>());
    }
    if (form == "lift") {
      return lift(from_json(spec.at("base")),
                  spec.at("coords").get<std::vector<int>>(),
                  spec.at("dim").get<int>());
    }
    throw ConfigError("unknown weight form: " + form);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed weight spec: ") + e.what());
  }
}

}  // namespace modcalc
