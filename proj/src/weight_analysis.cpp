// SPDX-License-Identifier: Apache-2.0
#include "modcalc/weights/analysis.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "modcalc/core/fourier.hpp"

namespace modcalc {

namespace {

constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();

// Endpoint-inclusive scan coordinates so box corners (frequent argmax
// sites) are always sampled, and doubling n-1 nests the grids.
std::vector<Eigen::ArrayXd> scan_axes(const Box& box, int n) {
  if (n < 2) throw ConfigError("scans need at least 2 samples per axis");
  std::vector<Eigen::ArrayXd> axes;
  for (int k = 0; k < box.dim(); ++k) {
    axes.push_back(Eigen::ArrayXd::LinSpaced(n, box.lo[k], box.hi[k]));
  }
  return axes;
}

void for_each_scan_point(const std::vector<Eigen::ArrayXd>& axes,
                         const std::function<void(const Eigen::VectorXd&)>& fn) {
  const int d = static_cast<int>(axes.size());
  std::vector<Index> counts(d);
  for (int k = 0; k < d; ++k) counts[k] = axes[k].size();
  Eigen::VectorXd x(d);
  for_each_index(counts, [&](const MultiIndex& j, Index) {
    for (int k = 0; k < d; ++k) x[k] = axes[k][j[k]];
    fn(x);
  });
}

Real log_factorial_power(const MultiIndex& alpha, Real s) {
  Real acc = 0.0;
  for (Index a : alpha) acc += std::lgamma(static_cast<Real>(a) + 1.0);
  return s * acc;
}

int total_order(const MultiIndex& alpha) {
  int n = 0;
  for (Index a : alpha) n += static_cast<int>(a);
  return n;
}

// Envelope fit shared by the two gevrey checks.  Input: per-|alpha|
// log-envelopes (kNegInf marks identically-zero derivative groups).
void fit_envelope(const std::vector<Real>& log_env, GevreyReport& rep) {
  const int m = static_cast<int>(log_env.size());
  rep.orders.resize(m);
  std::vector<int> active;  // orders with a nonzero envelope
  for (int n = 0; n < m; ++n) {
    rep.orders[n].order = n;
    rep.orders[n].log_envelope = log_env[n];
    rep.orders[n].finite = std::isfinite(log_env[n]) || log_env[n] == kNegInf;
    if (std::isfinite(log_env[n])) active.push_back(n);
  }
  rep.pass = true;
  for (const auto& st : rep.orders) rep.pass = rep.pass && st.finite;

  if (active.empty()) {
    // Identically zero field: any (C, h) works.
    rep.C = 1.0;
    rep.h = 1.0;
    rep.trend_C = 1.0;
    rep.trend_h = 1.0;
    rep.beurling_trend = true;
    return;
  }

  // Envelope pair: C(h) = max_n e_n h^{-n}; take the minimal C over a
  // log-spaced h sweep, then the smallest h attaining it.
  auto log_C_at = [&](Real log_h) {
    Real best = kNegInf;
    for (int n : active) {
      best = std::max(best, log_env[n] - static_cast<Real>(n) * log_h);
    }
    return best;
  };
  const int sweep = 1201;
  Real best_log_C = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < sweep; ++i) {
    const Real log_h = -3.0 * std::numbers::ln10 +
                       6.0 * std::numbers::ln10 * static_cast<Real>(i) /
                           static_cast<Real>(sweep - 1);
    best_log_C = std::min(best_log_C, log_C_at(log_h));
  }
  Real chosen_log_h = 3.0 * std::numbers::ln10;
  for (int i = 0; i < sweep; ++i) {
    const Real log_h = -3.0 * std::numbers::ln10 +
                       6.0 * std::numbers::ln10 * static_cast<Real>(i) /
                           static_cast<Real>(sweep - 1);
    if (log_C_at(log_h) <= best_log_C + 1e-9) {
      chosen_log_h = log_h;
      break;
    }
  }
  rep.C = std::exp(best_log_C);
  rep.h = std::exp(chosen_log_h);
  for (int n = 0; n < m; ++n) {
    rep.orders[n].residual =
        log_env[n] - (best_log_C + static_cast<Real>(n) * chosen_log_h);
  }

  // Least-squares trend line through the active envelope points.
  if (active.size() >= 2) {
    Real sn = 0, sy = 0, snn = 0, sny = 0;
    for (int n : active) {
      const Real fn = static_cast<Real>(n);
      sn += fn;
      sy += log_env[n];
      snn += fn * fn;
      sny += fn * log_env[n];
    }
    const Real cnt = static_cast<Real>(active.size());
    const Real slope = (cnt * sny - sn * sy) / (cnt * snn - sn * sn);
    const Real intercept = (sy - slope * sn) / cnt;
    rep.trend_h = std::exp(slope);
    rep.trend_C = std::exp(intercept);
  } else {
    rep.trend_h = 1.0;
    rep.trend_C = std::exp(log_env[active.front()]);
  }

  // Beurling trend: halving h below the fitted value must keep the
  // binding order interior (the envelope max not pinned at the
  // truncation order), i.e. the finite-order evidence still covers
  // that smaller h.  A geometric envelope C h0^n pins the max at the
  // truncation order for h < h0 and fails this.
  const int top = m - 1;
  auto binding_order = [&](Real log_h) {
    int arg = active.front();
    Real best = kNegInf;
    for (int n : active) {
      const Real v = log_env[n] - static_cast<Real>(n) * log_h;
      if (v > best) {
        best = v;
        arg = n;
      }
    }
    return arg;
  };
  rep.beurling_trend = binding_order(chosen_log_h - std::numbers::ln2) < top;
}

Real hermite_phys(int n, Real u) {
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

ModerationReport moderation_constant(const Weight& w, const Weight& v,
                                     const Box& box, int samples_per_axis) {
  if (w.dim() != v.dim() || w.dim() != box.dim()) {
    throw DimensionError("moderation scan needs matching dimensions");
  }
  if (samples_per_axis < 8) {
    throw ConfigError("moderation scan needs at least 8 samples per axis");
  }
  const auto axes = scan_axes(box, samples_per_axis);

  ModerationReport rep;
  rep.box = box;
  rep.samples_per_axis = samples_per_axis;
  rep.log_constant = kNegInf;
  // Precompute the x2 log-weights once; the x1 sweep reuses them.
  std::vector<Eigen::VectorXd> pts;
  std::vector<Real> log_v;
  for_each_scan_point(axes, [&](const Eigen::VectorXd& x2) {
    pts.push_back(x2);
    log_v.push_back(v.log_evaluate(x2));
  });
  for_each_scan_point(axes, [&](const Eigen::VectorXd& x1) {
    const Real log_w1 = w.log_evaluate(x1);
    for (size_t i = 0; i < pts.size(); ++i) {
      const Real log_ratio =
          w.log_evaluate(x1 + pts[i]) - log_w1 - log_v[i];
      if (log_ratio > rep.log_constant) {
        rep.log_constant = log_ratio;
        rep.argmax_x1 = x1;
        rep.argmax_x2 = pts[i];
      }
    }
  });
  rep.constant = std::exp(rep.log_constant);
  return rep;
}

PEClassification classify_PEs(const Weight& w, Real s,
                              const std::vector<Real>& r_grid,
                              const Box& box, int samples_per_axis,
                              Real finite_cap) {
  if (r_grid.empty()) throw ConfigError("classify_PEs needs a nonempty r grid");
  for (size_t i = 1; i < r_grid.size(); ++i) {
    if (r_grid[i] <= r_grid[i - 1]) {
      throw ConfigError("classify_PEs r grid must be increasing");
    }
  }
  PEClassification cls;
  cls.r_grid = r_grid;
  cls.box = box;
  cls.samples_per_axis = samples_per_axis;
  cls.log_finite_cap = std::log(finite_cap);

  bool any = false, all = true;
  for (Real r : r_grid) {
    const auto rep = moderation_constant(
        w, Weight::exp_power(r, s, w.dim()), box, samples_per_axis);
    const bool fin = rep.log_constant <= cls.log_finite_cap;
    cls.log_constants.push_back(rep.log_constant);
    cls.finite.push_back(fin);
    if (fin && !any) {
      any = true;
      cls.smallest_finite_r = r;
    }
    all = all && fin;
  }
  cls.verdict = all  ? GrowthVerdict::FitsAll
                : any ? GrowthVerdict::FitsSome
                      : GrowthVerdict::FitsNone;
  return cls;
}

PEClassification classify_PEs(const Weight& w, Real s,
                              const std::vector<Real>& r_grid) {
  const int d = w.dim();
  const int n = d == 1 ? 512 : d == 2 ? 32 : 12;
  return classify_PEs(w, s, r_grid, Box::centered(d, 1000.0), n);
}

MollifyResult mollify(const Weight& w, Real s, Real c, const Box& inner_box,
                      Index samples_per_axis) {
  if (!(c > 0.0)) throw ConfigError("mollify needs a positive decay rate");
  if (w.dim() != inner_box.dim()) {
    throw DimensionError("mollify box dimension mismatch");
  }
  (void)s;  // s configures downstream checks; the kernel itself is Gaussian
  const int d = w.dim();
  const Real pad = 4.0 / std::sqrt(c);

  // Padded grid: cell-centered, spacing fine enough that the discrete
  // Gaussian mass matches the integral to ~1e-14.
  Eigen::ArrayXd lo = inner_box.lo - pad, hi = inner_box.hi + pad;
  std::vector<Index> counts(d);
  Eigen::ArrayXd steps(d), offsets(d);
  for (int k = 0; k < d; ++k) {
    const Real width = hi[k] - lo[k];
    Index n = samples_per_axis;
    if (n <= 0) {
      n = static_cast<Index>(std::ceil(width * std::sqrt(c) / 0.35));
      n = 4 * ((n + 3) / 4);
    }
    counts[k] = n;
    steps[k] = width / static_cast<Real>(n);
    offsets[k] = lo[k] + 0.5 * steps[k];
  }
  UniformGrid grid(OrderedBasis::identity(d), counts, steps, offsets);

  // Cyclic convolution of the sampled weight with the wrapped kernel.
  Eigen::ArrayXcd wv(grid.size()), kv(grid.size());
  const Real kernel_scale = std::pow(c / std::numbers::pi, 0.5 * d);
  for_each_index(counts, [&](const MultiIndex& j, Index lin) {
    wv[lin] = std::exp(w.log_evaluate(grid.coordinates(j)));
    Real q2 = 0.0;
    for (int k = 0; k < d; ++k) {
      // Displacement for index offset j_k with wrap-around.
      Index m = j[k] <= counts[k] / 2 ? j[k] : j[k] - counts[k];
      const Real delta = static_cast<Real>(m) * steps[k];
      q2 += delta * delta;
    }
    kv[lin] = kernel_scale * std::exp(-c * q2);
  });
  cyclic_dft(wv, counts, false);
  cyclic_dft(kv, counts, false);
  wv *= kv;
  cyclic_dft(wv, counts, true);
  const Real norm = grid.steps.prod() / static_cast<Real>(grid.size());
  Eigen::ArrayXcd conv = wv * norm;

  Eigen::ArrayXcd table(conv.size());
  for (Index i = 0; i < conv.size(); ++i) {
    const Real v = conv[i].real();
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw NumericError("mollify: convolution left a nonpositive value");
    }
    table[i] = v;
  }
  SampledField table_field(grid, std::move(table));

  MollifyResult res{Weight::tabulated(table_field), w, c, kNegInf,
                    std::numeric_limits<Real>::infinity(), inner_box, grid};

  Real log_sup = kNegInf, log_inf = std::numeric_limits<Real>::infinity();
  for_each_index(counts, [&](const MultiIndex& j, Index lin) {
    const Eigen::VectorXd x = grid.coordinates(j);
    for (int k = 0; k < d; ++k) {
      if (x[k] < inner_box.lo[k] || x[k] > inner_box.hi[k]) return;
    }
    const Real log_ratio = std::log(conv[lin].real()) - w.log_evaluate(x);
    log_sup = std::max(log_sup, log_ratio);
    log_inf = std::min(log_inf, log_ratio);
  });
  res.ratio_sup = std::exp(log_sup);
  res.ratio_inf = std::exp(log_inf);
  if (!(res.ratio_inf >= 1e-6) || !(res.ratio_sup <= 1e6)) {
    throw NumericError("mollify: omega0/omega ratio left [1e-6, 1e6]");
  }
  return res;
}

GevreyReport gevrey_derivative_check(const SampledField& f, const Weight& w,
                                     Real s, int max_order) {
  if (max_order < 0 || max_order > 12) {
    throw ConfigError("gevrey check: max_order must lie in [0, 12]");
  }
  const int d = f.grid().dim();
  if (w.dim() != d) {
    throw DimensionError("gevrey check: weight dimension mismatch");
  }
  std::vector<Real> log_env(max_order + 1, kNegInf);
  // Log-weight at every grid point, once.
  Eigen::ArrayXd log_w(f.size());
  for_each_index(f.grid().counts, [&](const MultiIndex& j, Index lin) {
    log_w[lin] = w.log_evaluate(f.grid().coordinates(j));
  });
  for (const MultiIndex& alpha : multi_indices_up_to(d, max_order)) {
    const int n = total_order(alpha);
    const SampledField da =
        n == 0 ? f : spectral_derivative(f, alpha);
    const Real lfp = log_factorial_power(alpha, s);
    Real best = kNegInf;
    for (Index i = 0; i < da.size(); ++i) {
      const Real mag = std::abs(da(i));
      if (mag > 0.0) {
        best = std::max(best, std::log(mag) - lfp - log_w[i]);
      }
    }
    log_env[n] = std::max(log_env[n], best);
  }
  GevreyReport rep;
  fit_envelope(log_env, rep);
  return rep;
}

GevreyReport gevrey_derivative_check(const MollifyResult& m, Real s,
                                     int max_order, int probes_per_axis) {
  if (max_order < 0 || max_order > 12) {
    throw ConfigError("gevrey check: max_order must lie in [0, 12]");
  }
  const int d = m.table_grid.dim();
  const Real c = m.kernel_c;
  const Real kernel_scale = std::pow(c / std::numbers::pi, 0.5 * d);
  const Real sqrt_c = std::sqrt(c);

  // Source-weight samples over the table grid, reused per probe.
  const auto& counts = m.table_grid.counts;
  Eigen::ArrayXd wv(m.table_grid.size());
  for_each_index(counts, [&](const MultiIndex& j, Index lin) {
    wv[lin] = std::exp(m.source.log_evaluate(m.table_grid.coordinates(j)));
  });
  const Real cell = m.table_grid.steps.prod();
  const auto probe_axes = scan_axes(m.inner_box, probes_per_axis);

  std::vector<Real> log_env(max_order + 1, kNegInf);
  for (const MultiIndex& alpha : multi_indices_up_to(d, max_order)) {
    const int n = total_order(alpha);
    const Real lfp = log_factorial_power(alpha, s);
    Real best = kNegInf;
    for_each_scan_point(probe_axes, [&](const Eigen::VectorXd& x) {
      // d^alpha (w * phi)(x) = sum_j w(y_j) (d^alpha phi)(x - y_j) h^d
      Real acc = 0.0;
      for_each_index(counts, [&](const MultiIndex& j, Index lin) {
        Real term = kernel_scale;
        for (int k = 0; k < d; ++k) {
          const Real u = sqrt_c * (x[k] - m.table_grid.coordinate(k, j[k]));
          Real hermite = hermite_phys(static_cast<int>(alpha[k]), u);
          if (alpha[k] % 2 == 1) hermite = -hermite;
          term *= std::pow(sqrt_c, static_cast<Real>(alpha[k])) * hermite *
                  std::exp(-u * u);
        }
        acc += wv[lin] * term;
      });
      acc *= cell;
      const Real mag = std::abs(acc);
      if (mag > 0.0) {
        best = std::max(best,
                        std::log(mag) - lfp - m.omega0.log_evaluate(x));
      }
    });
    log_env[n] = std::max(log_env[n], best);
  }
  GevreyReport rep;
  fit_envelope(log_env, rep);
  return rep;
}

CompatibilityReport weight_compatibility(const Weight& w1, const Weight& w2,
                                         const Weight& w0, const Box& box,
                                         int samples_per_axis) {
  const int d = box.dim();
  if (w1.dim() != 2 * d || w2.dim() != 2 * d || w0.dim() != 4 * d) {
    throw DimensionError(
        "weight_compatibility needs weights on R^{2d} and R^{4d} with a box "
        "on R^d");
  }
  const auto axes = scan_axes(box, samples_per_axis);
  std::vector<Eigen::VectorXd> pts;
  for_each_scan_point(axes, [&](const Eigen::VectorXd& p) { pts.push_back(p); });

  CompatibilityReport rep;
  rep.box = box;
  rep.samples_per_axis = samples_per_axis;
  rep.log_constant = kNegInf;
  Eigen::VectorXd p2(2 * d), p1(2 * d), p0(4 * d);
  for (const auto& x : pts) {
    for (const auto& xi : pts) {
      p2 << x, xi;
      const Real log_w2 = w2.log_evaluate(p2);
      for (const auto& y : pts) {
        for (const auto& eta : pts) {
          p1 << y, eta;
          p0 << x, eta, xi - eta, y - x;
          const Real log_ratio =
              log_w2 - w1.log_evaluate(p1) - w0.log_evaluate(p0);
          if (log_ratio > rep.log_constant) {
            rep.log_constant = log_ratio;
            rep.argmax.resize(4 * d);
            rep.argmax << x, xi, y, eta;
          }
        }
      }
    }
  }
  rep.constant = std::exp(rep.log_constant);
  return rep;
}

namespace {

nlohmann::json box_json(const Box& box) {
  return {{"lo", std::vector<Real>(box.lo.begin(), box.lo.end())},
          {"hi", std::vector<Real>(box.hi.begin(), box.hi.end())}};
}

std::vector<Real> vec_json(const Eigen::VectorXd& v) {
  return std::vector<Real>(v.begin(), v.end());
}

}  // namespace

nlohmann::json to_json(const ModerationReport& rep) {
  return {{"constant", rep.constant},
          {"log_constant", rep.log_constant},
          {"argmax_x1", vec_json(rep.argmax_x1)},
          {"argmax_x2", vec_json(rep.argmax_x2)},
          {"box", box_json(rep.box)},
          {"samples_per_axis", rep.samples_per_axis}};
}

nlohmann::json to_json(const PEClassification& cls) {
  const char* verdict = cls.verdict == GrowthVerdict::FitsAll    ? "fits_all"
                        : cls.verdict == GrowthVerdict::FitsSome ? "fits_some"
                                                                 : "fits_none";
  return {{"verdict", verdict},
          {"smallest_finite_r", cls.smallest_finite_r},
          {"r_grid", cls.r_grid},
          {"log_constants", cls.log_constants},
          {"finite", cls.finite},
          {"log_finite_cap", cls.log_finite_cap},
          {"box", box_json(cls.box)},
          {"samples_per_axis", cls.samples_per_axis}};
}

nlohmann::json to_json(const GevreyReport& rep) {
  nlohmann::json orders = nlohmann::json::array();
  for (const auto& st : rep.orders) {
    orders.push_back({{"order", st.order},
                      {"log_envelope", st.log_envelope},
                      {"residual", st.residual},
                      {"finite", st.finite}});
  }
  return {{"C", rep.C},
          {"h", rep.h},
          {"trend_C", rep.trend_C},
          {"trend_h", rep.trend_h},
          {"beurling_trend", rep.beurling_trend},
          {"orders", orders},
          {"pass", rep.pass}};
}

nlohmann::json to_json(const CompatibilityReport& rep) {
  return {{"constant", rep.constant},
          {"log_constant", rep.log_constant},
          {"argmax", vec_json(rep.argmax)},
          {"box", box_json(rep.box)},
          {"samples_per_axis", rep.samples_per_axis}};
}

ExpEnvelopeReport exp_envelope_diagnostic(const Weight& w, Real r,
                                          const Box& box,
                                          int samples_per_axis) {
  const auto axes = scan_axes(box, samples_per_axis);
  ExpEnvelopeReport rep{kNegInf, kNegInf};
  for_each_scan_point(axes, [&](const Eigen::VectorXd& x) {
    const Real log_w = w.log_evaluate(x);
    const Real rx = r * x.norm();
    rep.upper_log_constant = std::max(rep.upper_log_constant, log_w - rx);
    rep.lower_log_constant = std::max(rep.lower_log_constant, -rx - log_w);
  });
  return rep;
}

}  // namespace modcalc
