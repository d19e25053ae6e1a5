// SPDX-License-Identifier: Apache-2.0
//
// Diagnostics on weights: moderateness scans, growth-class
// classification against e^{r|x|^{1/s}}, constructive mollification,
// and derivative-envelope (Gevrey) checks.
//
// Every scan works on a finite box with a finite sample grid; results
// are evidence about that box, not claims about all of R^d, and each
// report carries its box/grid metadata.

#ifndef MODCALC_WEIGHTS_ANALYSIS_HPP
#define MODCALC_WEIGHTS_ANALYSIS_HPP

#include "modcalc/weights/weight.hpp"

namespace modcalc {

// Axis-aligned box [lo_k, hi_k] per axis.
struct Box {
  Eigen::ArrayXd lo, hi;
  static Box centered(int dim, Real half_width) {
    return Box{Eigen::ArrayXd::Constant(dim, -half_width),
               Eigen::ArrayXd::Constant(dim, half_width)};
  }
  int dim() const { return static_cast<int>(lo.size()); }
};

struct ModerationReport {
  Real constant = 0.0;       // sup of w(x1+x2) / (w(x1) v(x2)); may be +inf
  Real log_constant = 0.0;   // same in log space (always finite to compute)
  Eigen::VectorXd argmax_x1, argmax_x2;
  Box box{Eigen::ArrayXd(), Eigen::ArrayXd()};
  int samples_per_axis = 0;
};

// Deterministic endpoint-inclusive scan of (x1, x2) over box^2.
// The scan is monotone in both the box and the sample count for nested
// configurations.
ModerationReport moderation_constant(const Weight& w, const Weight& v,
                                     const Box& box, int samples_per_axis);

enum class GrowthVerdict { FitsNone, FitsSome, FitsAll };

struct PEClassification {
  GrowthVerdict verdict = GrowthVerdict::FitsNone;
  Real smallest_finite_r = 0.0;  // meaningful when verdict != FitsNone
  std::vector<Real> r_grid;
  std::vector<Real> log_constants;   // per r
  std::vector<bool> finite;         // per r: log-constant under the cap
  Real log_finite_cap = 0.0;
  Box box{Eigen::ArrayXd(), Eigen::ArrayXd()};
  int samples_per_axis = 0;
};

// Classifies growth by running moderation_constant against
// v = e^{r| . |^{1/s}} for each r.  "Finite" means the scanned
// log-constant stays below log(finite_cap); the wide default box makes
// the cap discriminating (a weight needing r' > r builds up ratio
// e^{(r'-r)|x|} across the box, blowing past any desk-scale cap).
PEClassification classify_PEs(const Weight& w, Real s,
                              const std::vector<Real>& r_grid,
                              const Box& box, int samples_per_axis,
                              Real finite_cap = 1e8);
// Defaults: box [-1000, 1000]^d, 512 samples per axis for d = 1
// (32 for d = 2, 12 above that, keeping the pair scan tractable).
PEClassification classify_PEs(const Weight& w, Real s,
                              const std::vector<Real>& r_grid);

struct MollifyResult {
  Weight omega0;          // tabulated w * phi on the padded grid
  Weight source;          // the original weight
  Real kernel_c = 0.0;    // phi(x) = (c/pi)^{d/2} e^{-c|x|^2}
  Real ratio_sup = 0.0;   // sup of omega0/w over the inner box
  Real ratio_inf = 0.0;   // inf of omega0/w over the inner box
  Box inner_box{Eigen::ArrayXd(), Eigen::ArrayXd()};
  UniformGrid table_grid;
};

// omega0 = w * phi with a unit-mass Gaussian phi, computed by FFT
// convolution on a grid padded by 4 decay lengths of phi.  The ratio
// bounds quantify the "omega0 comparable to w" property; bounds outside
// [1e-6, 1e6] raise NumericError (mollification diverged).
MollifyResult mollify(const Weight& w, Real s, Real c, const Box& inner_box,
                      Index samples_per_axis = 0);

struct GevreyOrderStat {
  int order = 0;           // |alpha|
  Real log_envelope = 0.0; // log max over alpha of sup_x |d^a f| / (a!^s w)
  Real residual = 0.0;     // log_envelope - (log C + order * log h)
  bool finite = false;
};

struct GevreyReport {
  Real C = 0.0;            // envelope constant at the fitted h
  Real h = 0.0;            // smallest h attaining the minimal constant
  Real trend_C = 0.0;      // least-squares line through the envelope
  Real trend_h = 0.0;
  bool beurling_trend = false;  // envelope constants stay finite down the
                                // decreasing-h sweep (trend, not a verdict)
  std::vector<GevreyOrderStat> orders;
  bool pass = false;       // all requested orders produced finite envelopes
};

// Checks |d^alpha f(x)| <= C h^{|alpha|} alpha!^s w(x) over the grid for
// all |alpha| <= max_order, differentiating spectrally.
GevreyReport gevrey_derivative_check(const SampledField& f, const Weight& w,
                                     Real s, int max_order);

// Same inequality for a mollified weight, with derivatives computed
// exactly from the convolution (d^a (w*phi) = w * d^a phi); spectral
// differentiation would be swamped by the table's growth at the box
// edge.  Probes an inner sub-lattice.
GevreyReport gevrey_derivative_check(const MollifyResult& m, Real s,
                                     int max_order,
                                     int probes_per_axis = 17);

struct CompatibilityReport {
  Real constant = 0.0;      // sup w2(x,xi) / (w1(y,eta) w0(x,eta,xi-eta,y-x))
  Real log_constant = 0.0;
  Eigen::VectorXd argmax;   // concatenated (x, xi, y, eta)
  Box box{Eigen::ArrayXd(), Eigen::ArrayXd()};
  int samples_per_axis = 0;
};

// Scans the operator-continuity weight hypothesis over box^2 x box^2
// (w1, w2 on R^{2d}, w0 on R^{4d}).
CompatibilityReport weight_compatibility(const Weight& w1, const Weight& w2,
                                         const Weight& w0, const Box& box,
                                         int samples_per_axis);

struct ExpEnvelopeReport {
  Real upper_log_constant = 0.0;  // sup log(w(x) / e^{r|x|})
  Real lower_log_constant = 0.0;  // sup log(e^{-r|x|} / w(x))
};

// Diagnostic for the two-sided bound e^{-r|x|} <= C w(x) and
// w(x) <= C e^{r|x|} on a box; reported as data, not a class verdict.
ExpEnvelopeReport exp_envelope_diagnostic(const Weight& w, Real r,
                                          const Box& box,
                                          int samples_per_axis);

nlohmann::json to_json(const ModerationReport& rep);
nlohmann::json to_json(const PEClassification& cls);
nlohmann::json to_json(const GevreyReport& rep);
nlohmann::json to_json(const CompatibilityReport& rep);

}  // namespace modcalc

#endif
