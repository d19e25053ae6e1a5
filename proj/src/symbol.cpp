// SPDX-License-Identifier: Apache-2.0
#include "modcalc/pdo/symbol.hpp"

#include <cmath>
#include <utility>

namespace modcalc {

namespace {

Real ipow(Real base, Index n) {
  Real acc = 1.0;
  for (Index k = 0; k < n; ++k) acc *= base;
  return acc;
}

Eigen::VectorXd json_vector(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (Index k = 0; k < v.size(); ++k) v[k] = j.at(k).get<Real>();
  return v;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

bool zero_or_empty(const Eigen::VectorXd& v) {
  return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0;
}

// Fill defaults and validate one term against the signal dimension.
void normalize_term(SymbolTerm& t, int d) {
  if (t.xpow.empty()) t.xpow.assign(d, 0);
  if (t.xipow.empty()) t.xipow.assign(d, 0);
  if (static_cast<int>(t.xpow.size()) != d ||
      static_cast<int>(t.xipow.size()) != d) {
    throw DimensionError("term monomial orders must match the dimension");
  }
  for (Index p : t.xpow) {
    if (p < 0) throw ConfigError("monomial orders are nonnegative");
  }
  for (Index p : t.xipow) {
    if (p < 0) throw ConfigError("monomial orders are nonnegative");
  }
  if (t.xmod.size() != 0 && t.xmod.size() != d) {
    throw DimensionError("x modulation must match the dimension");
  }
  if (t.ximod.size() != 0 && t.ximod.size() != d) {
    throw DimensionError("xi modulation must match the dimension");
  }
  if (t.gaussian) {
    if (t.center.size() != 2 * d || t.sigma.size() != 2 * d) {
      throw DimensionError("Gaussian factors live on phase space");
    }
    for (Index k = 0; k < t.sigma.size(); ++k) {
      if (t.sigma[k] < 0.0) {
        throw ConfigError("Gaussian widths are nonnegative (zero disables "
                          "the factor on that axis)");
      }
    }
  }
}

}  // namespace

nlohmann::json SymbolTerm::to_json() const {
  nlohmann::json j = {{"coef", {coef.real(), coef.imag()}},
                      {"xpow", xpow},
                      {"xipow", xipow}};
  if (!zero_or_empty(xmod)) j["xmod"] = vector_json(xmod);
  if (!zero_or_empty(ximod)) j["ximod"] = vector_json(ximod);
  if (gaussian) {
    j["center"] = vector_json(center);
    j["sigma"] = vector_json(sigma);
  }
  return j;
}

SymbolTerm SymbolTerm::from_json(const nlohmann::json& j, int dim) {
  SymbolTerm t;
  t.coef = Complex(j.at("coef").at(0).get<Real>(),
                   j.at("coef").at(1).get<Real>());
  t.xpow = j.at("xpow").get<MultiIndex>();
  t.xipow = j.at("xipow").get<MultiIndex>();
  if (j.contains("xmod")) t.xmod = json_vector(j.at("xmod"));
  if (j.contains("ximod")) t.ximod = json_vector(j.at("ximod"));
  if (j.contains("center")) {
    t.gaussian = true;
    t.center = json_vector(j.at("center"));
    t.sigma = json_vector(j.at("sigma"));
  }
  normalize_term(t, dim);
  return t;
}

Symbol Symbol::closed_form(std::vector<SymbolTerm> terms, int dim) {
  if (dim < 1) throw DimensionError("symbols need at least one dimension");
  for (SymbolTerm& t : terms) normalize_term(t, dim);
  Symbol a;
  a.kind_ = SymbolKind::Closed;
  a.dim_ = dim;
  a.terms_ = std::move(terms);
  return a;
}

Symbol Symbol::constant(Complex c, int dim) {
  SymbolTerm t;
  t.coef = c;
  return closed_form({std::move(t)}, dim);
}

Symbol Symbol::polynomial(std::vector<SymbolTerm> terms, int dim) {
  for (const SymbolTerm& t : terms) {
    if (t.gaussian || !zero_or_empty(t.xmod) || !zero_or_empty(t.ximod)) {
      throw ConfigError("polynomial terms carry monomials only");
    }
  }
  return closed_form(std::move(terms), dim);
}

Symbol Symbol::modulation(const Eigen::VectorXd& xmod,
                          const Eigen::VectorXd& ximod) {
  const int d = static_cast<int>(std::max(xmod.size(), ximod.size()));
  SymbolTerm t;
  t.xmod = xmod;
  t.ximod = ximod;
  return closed_form({std::move(t)}, d);
}

Symbol Symbol::separable(const std::vector<SymbolTerm>& u,
                         const std::vector<SymbolTerm>& w, int dim) {
  // Factors are one-block term lists in their own variable, written in
  // the x-side fields (a w factor's monomial sits in xpow, etc.).
  const auto check_factor = [&](const SymbolTerm& t) {
    if (static_cast<int>(t.xpow.size()) > dim ||
        !t.xipow.empty() || t.ximod.size() != 0) {
      throw ConfigError("separable factors use the x-side fields only");
    }
    if (t.gaussian &&
        (t.center.size() != dim || t.sigma.size() != dim)) {
      throw DimensionError("factor Gaussians live on one block");
    }
  };
  std::vector<SymbolTerm> terms;
  for (const SymbolTerm& tu : u) {
    check_factor(tu);
    for (const SymbolTerm& tw : w) {
      check_factor(tw);
      SymbolTerm t;
      t.coef = tu.coef * tw.coef;
      t.xpow = tu.xpow;
      t.xpow.resize(dim, 0);
      t.xipow = tw.xpow;
      t.xipow.resize(dim, 0);
      t.xmod = tu.xmod;
      t.ximod = tw.xmod;
      if (tu.gaussian || tw.gaussian) {
        t.gaussian = true;
        t.center = Eigen::VectorXd::Zero(2 * dim);
        t.sigma = Eigen::VectorXd::Zero(2 * dim);
        if (tu.gaussian) {
          t.center.head(dim) = tu.center;
          t.sigma.head(dim) = tu.sigma;
        }
        if (tw.gaussian) {
          t.center.tail(dim) = tw.center;
          t.sigma.tail(dim) = tw.sigma;
        }
      }
      terms.push_back(std::move(t));
    }
  }
  return closed_form(std::move(terms), dim);
}

Symbol Symbol::gaussian_envelope(const Eigen::VectorXd& center,
                                 const Eigen::VectorXd& widths) {
  if (center.size() != widths.size() || center.size() % 2 != 0) {
    throw DimensionError("Gaussian envelopes live on phase space");
  }
  SymbolTerm t;
  t.gaussian = true;
  t.center = center;
  t.sigma = widths;
  return closed_form({std::move(t)}, static_cast<int>(center.size()) / 2);
}

Symbol Symbol::sampled(SampledField data, bool non_decaying,
                       Real boundary_threshold) {
  const UniformGrid& g = data.grid();
  if (g.dim() % 2 != 0) {
    throw DimensionError("sampled symbols live on a phase-space grid");
  }
  if (!g.basis.is_identity(1e-12)) {
    throw UnsupportedBasisError("sampled symbols use identity-basis grids");
  }
  ensure_finite(data, "symbol data");

  Real peak = 0.0, edge = 0.0;
  for_each_index(g.counts, [&](const MultiIndex& j, Index lin) {
    const Real m = std::abs(data(lin));
    peak = std::max(peak, m);
    for (int k = 0; k < g.dim(); ++k) {
      if (j[k] == 0 || j[k] == g.counts[k] - 1) {
        edge = std::max(edge, m);
        break;
      }
    }
  });
  const Real ratio = peak > 0.0 ? edge / peak : 0.0;
  if (!non_decaying && ratio > boundary_threshold) {
    throw ConfigError(
        "sampled symbol does not decay at the grid boundary; flag it "
        "non-decaying or enlarge the box");
  }

  Symbol a;
  a.kind_ = SymbolKind::Sampled;
  a.dim_ = g.dim() / 2;
  a.data_.emplace(std::move(data));
  a.non_decaying_ = non_decaying;
  a.boundary_ratio_ = ratio;
  a.boundary_threshold_ = boundary_threshold;
  return a;
}

const SampledField& Symbol::data() const {
  if (!data_) throw ConfigError("closed-form symbols carry no sample data");
  return *data_;
}

Complex Symbol::value(const Eigen::VectorXd& x,
                      const Eigen::VectorXd& xi) const {
  Eigen::VectorXd z(2 * dim_);
  z.head(dim_) = x;
  z.tail(dim_) = xi;
  return value(z);
}

Complex Symbol::value(const Eigen::VectorXd& z) const {
  if (z.size() != 2 * dim_) {
    throw DimensionError("symbol evaluation point must be (x, xi)");
  }
  if (kind_ == SymbolKind::Sampled) {
    const UniformGrid& g = data_->grid();
    const int dd = g.dim();
    MultiIndex base(dd);
    Eigen::ArrayXd frac(dd);
    for (int k = 0; k < dd; ++k) {
      const Real t = (z[k] - g.offsets[k]) / g.steps[k];
      if (t < -1.0 || t > static_cast<Real>(g.counts[k])) return 0.0;
      const Real fl = std::floor(t);
      base[k] = static_cast<Index>(fl);
      frac[k] = t - fl;
    }
    Complex acc = 0.0;
    MultiIndex j(dd);
    for (Index corner = 0; corner < (Index{1} << dd); ++corner) {
      Real w = 1.0;
      bool outside = false;
      for (int k = 0; k < dd; ++k) {
        const Index bit = (corner >> k) & 1;
        j[k] = base[k] + bit;
        w *= bit ? frac[k] : 1.0 - frac[k];
        if (j[k] < 0 || j[k] >= g.counts[k]) outside = true;
      }
      if (outside || w == 0.0) continue;
      acc += w * data_->at(j);
    }
    return acc;
  }

  Complex acc = 0.0;
  for (const SymbolTerm& t : terms_) {
    Real mag = 1.0;
    for (int k = 0; k < dim_; ++k) {
      if (t.xpow[k] > 0) mag *= ipow(z[k], t.xpow[k]);
      if (t.xipow[k] > 0) mag *= ipow(z[dim_ + k], t.xipow[k]);
    }
    Real phase = 0.0;
    if (t.xmod.size() != 0) phase += t.xmod.dot(z.head(dim_));
    if (t.ximod.size() != 0) phase += t.ximod.dot(z.tail(dim_));
    if (t.gaussian) {
      Real quad = 0.0;
      for (Index k = 0; k < 2 * dim_; ++k) {
        if (t.sigma[k] > 0.0) {
          const Real u = (z[k] - t.center[k]) / t.sigma[k];
          quad += u * u;
        }
      }
      mag *= std::exp(-0.5 * quad);
    }
    acc += t.coef * std::polar(mag, phase);
  }
  return acc;
}

bool Symbol::series_convertible() const {
  if (kind_ != SymbolKind::Closed) return false;
  for (const SymbolTerm& t : terms_) {
    if (t.gaussian || !zero_or_empty(t.xmod)) return false;
  }
  return true;
}

Symbol Symbol::conjugated() const {
  Symbol b = *this;
  if (kind_ == SymbolKind::Sampled) {
    b.data_->values() = b.data_->values().conjugate();
    return b;
  }
  for (SymbolTerm& t : b.terms_) {
    t.coef = std::conj(t.coef);
    t.xmod = -t.xmod;
    t.ximod = -t.ximod;
  }
  return b;
}

Symbol Symbol::with_envelope(Weight omega0, Real gevrey_order) const {
  if (omega0.dim() != 2 * dim_) {
    throw DimensionError("envelope weights live on phase space");
  }
  if (!(gevrey_order > 0.0)) {
    throw ConfigError("the Gevrey order is positive");
  }
  Symbol b = *this;
  b.envelope_ = std::move(omega0);
  b.envelope_order_ = gevrey_order;
  return b;
}

nlohmann::json Symbol::to_json() const {
  nlohmann::json j;
  if (kind_ == SymbolKind::Closed) {
    j["kind"] = "closed";
    j["dim"] = dim_;
    nlohmann::json terms = nlohmann::json::array();
    for (const SymbolTerm& t : terms_) terms.push_back(t.to_json());
    j["terms"] = std::move(terms);
  } else {
    j["kind"] = "sampled";
    j["non_decaying"] = non_decaying_;
    j["boundary_threshold"] = boundary_threshold_;
    j["field"] = field_to_json(*data_);
  }
  if (envelope_.valid()) {
    j["envelope"] = envelope_.to_json();
    j["gevrey_order"] = envelope_order_;
  }
  return j;
}

Symbol Symbol::from_json(const nlohmann::json& j) {
  try {
    Symbol a;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "closed") {
      const int d = j.at("dim").get<int>();
      std::vector<SymbolTerm> terms;
      for (const auto& tj : j.at("terms")) {
        terms.push_back(SymbolTerm::from_json(tj, d));
      }
      a = closed_form(std::move(terms), d);
    } else if (kind == "sampled") {
      a = sampled(field_from_json(j.at("field")),
                  j.at("non_decaying").get<bool>(),
                  j.at("boundary_threshold").get<Real>());
    } else {
      throw ConfigError("unknown symbol kind: " + kind);
    }
    if (j.contains("envelope")) {
      a = a.with_envelope(Weight::from_json(j.at("envelope")),
                          j.at("gevrey_order").get<Real>());
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed symbol: ") + e.what());
  }
}

void save_symbol(const Symbol& a, const std::string& path) {
  nlohmann::json desc = a.to_json();
  if (a.kind() == SymbolKind::Sampled) {
    desc.erase("field");  // the carrier field holds the data
    save_field(a.data(), path, {{"SYMB", desc}});
    return;
  }
  const UniformGrid carrier(OrderedBasis::identity(2 * a.dim()),
                            std::vector<Index>(2 * a.dim(), 1),
                            Eigen::ArrayXd::Ones(2 * a.dim()),
                            Eigen::ArrayXd::Zero(2 * a.dim()));
  SampledField one_point(carrier);
  one_point(0) = a.value(Eigen::VectorXd::Zero(2 * a.dim()));
  save_field(one_point, path, {{"SYMB", desc}});
}

Symbol load_symbol(const std::string& path) {
  MetadataBlocks meta;
  SampledField carrier = load_field(path, &meta);
  const auto it = meta.find("SYMB");
  if (it == meta.end()) {
    throw FormatError("file carries no symbol block: " + path);
  }
  nlohmann::json desc = it->second;
  try {
    if (desc.at("kind").get<std::string>() == "sampled") {
      desc["field"] = field_to_json(carrier);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed symbol block: ") + e.what());
  }
  return Symbol::from_json(desc);
}

}  // namespace modcalc
