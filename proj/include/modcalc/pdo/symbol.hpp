// SPDX-License-Identifier: Apache-2.0
//
// Phase-space symbols a(x, xi): either closed forms built from a small
// term algebra (monomials, modulations, Gaussian envelopes and their
// products and sums), or data sampled on a phase-space grid.  Closed
// forms evaluate exactly at any point; sampled symbols interpolate and
// must decay at the grid boundary unless flagged otherwise.

#ifndef MODCALC_PDO_SYMBOL_HPP
#define MODCALC_PDO_SYMBOL_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modcalc/core/field.hpp"
#include "modcalc/weights/weight.hpp"

namespace modcalc {

// One product term  coef * x^xpow * xi^xipow * e^{i(<xmod,x> + <ximod,xi>)}
// * exp(-sum_a ((z_a - center_a) / sigma_a)^2 / 2)  (the Gaussian factor
// only when `gaussian` is set; z = (x, xi)).
struct SymbolTerm {
  Complex coef = 1.0;
  MultiIndex xpow, xipow;       // monomial orders, one entry per axis
  Eigen::VectorXd xmod, ximod;  // modulation vectors (empty means zero)
  bool gaussian = false;
  Eigen::VectorXd center;       // 2d entries when gaussian is set
  Eigen::VectorXd sigma;        // widths, 2d entries; 0 disables an axis

  nlohmann::json to_json() const;
  static SymbolTerm from_json(const nlohmann::json& j, int dim);
};

enum class SymbolKind { Closed, Sampled };

class Symbol {
 public:
  // --- closed forms ---
  static Symbol constant(Complex c, int dim);
  // Sum of monomial terms coef * x^xpow * xi^xipow.
  static Symbol polynomial(std::vector<SymbolTerm> terms, int dim);
  // e^{i(<xmod, x> + <ximod, xi>)}.
  static Symbol modulation(const Eigen::VectorXd& xmod,
                           const Eigen::VectorXd& ximod);
  // u(x) * w(xi): the product of a term list in x alone and one in xi
  // alone (each factor may carry monomials, modulations, Gaussians).
  static Symbol separable(const std::vector<SymbolTerm>& u,
                          const std::vector<SymbolTerm>& w, int dim);
  // exp(-sum_a ((z_a - center_a)/widths_a)^2 / 2) on phase space.
  static Symbol gaussian_envelope(const Eigen::VectorXd& center,
                                  const Eigen::VectorXd& widths);
  // General term sum.
  static Symbol closed_form(std::vector<SymbolTerm> terms, int dim);

  // --- sampled data on a 2d-dimensional phase grid ---
  // Boundary samples larger than `boundary_threshold` times the peak
  // require non_decaying = true (growing symbols cannot ride FFT paths).
  static Symbol sampled(SampledField data, bool non_decaying = false,
                        Real boundary_threshold = 1e-6);

  SymbolKind kind() const { return kind_; }
  bool closed() const { return kind_ == SymbolKind::Closed; }
  int dim() const { return dim_; }  // signal dimension d, phase space 2d

  Complex value(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;
  Complex value(const Eigen::VectorXd& z) const;  // z = (x, xi)

  const std::vector<SymbolTerm>& terms() const { return terms_; }
  const SampledField& data() const;  // sampled symbols only
  bool non_decaying() const { return non_decaying_; }
  Real boundary_ratio() const { return boundary_ratio_; }
  Real boundary_threshold() const { return boundary_threshold_; }

  // True when every term avoids Gaussian factors and x-side
  // modulations; the mixed-derivative series then terminates.
  bool series_convertible() const;

  // Entrywise complex conjugate (negated modulations for closed forms).
  Symbol conjugated() const;

  // Declared growth envelope: omega0 on phase space with a Gevrey
  // order; advisory metadata carried through transformations.
  Symbol with_envelope(Weight omega0, Real gevrey_order) const;
  const Weight& envelope() const { return envelope_; }
  Real envelope_order() const { return envelope_order_; }

  nlohmann::json to_json() const;
  static Symbol from_json(const nlohmann::json& j);

 private:
  Symbol() = default;

  SymbolKind kind_ = SymbolKind::Closed;
  int dim_ = 0;
  std::vector<SymbolTerm> terms_;
  std::optional<SampledField> data_;
  bool non_decaying_ = false;
  Real boundary_ratio_ = 0.0;
  Real boundary_threshold_ = 1e-6;
  Weight envelope_;
  Real envelope_order_ = 0.0;
};

// File round trip: the field container plus a "SYMB" metadata block
// (closed-form descriptor, flags, envelope spec).  Closed forms ride a
// one-point placeholder field.
void save_symbol(const Symbol& a, const std::string& path);
Symbol load_symbol(const std::string& path);

}  // namespace modcalc

#endif
