// SPDX-License-Identifier: Apache-2.0
#include "modcalc/stft/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modcalc/core/errors.hpp"
#include "modcalc/core/fourier.hpp"

namespace modcalc {

namespace {

Real log_factorial_power(const MultiIndex& alpha, Real exponent) {
  Real acc = 0.0;
  for (Index a : alpha) acc += std::lgamma(static_cast<Real>(a) + 1.0);
  return exponent * acc;
}

int total_order(const MultiIndex& alpha) {
  Index n = 0;
  for (Index a : alpha) n += a;
  return static_cast<int>(n);
}

}  // namespace

Real gs_seminorm(const SampledField& f, Real s, Real sigma, Real h,
                 int max_order) {
  if (!(h > 0.0)) throw ConfigError("gs_seminorm needs h > 0");
  if (max_order < 0 || max_order > 12) {
    throw ConfigError("gs_seminorm max_order must lie in [0, 12]");
  }
  ensure_finite(f, "gs_seminorm input");
  const UniformGrid& g = f.grid();
  const int d = g.dim();

  // |x_k|^b at every grid coordinate, per axis and power.
  std::vector<Eigen::ArrayXXd> coord_pow(d);
  for (int k = 0; k < d; ++k) {
    coord_pow[k].resize(max_order + 1, g.counts[k]);
    for (Index j = 0; j < g.counts[k]; ++j) {
      const Real x = std::abs(g.coordinate(k, j));
      Real p = 1.0;
      for (int b = 0; b <= max_order; ++b) {
        coord_pow[k](b, j) = p;
        p *= x;
      }
    }
  }

  const std::vector<MultiIndex> orders = multi_indices_up_to(d, max_order);
  const Real log_h = std::log(h);
  Real best = 0.0;
  for (const MultiIndex& alpha : orders) {
    const SampledField da = spectral_derivative(f, alpha);
    for (const MultiIndex& beta : orders) {
      Real sup = 0.0;
      for_each_index(g.counts, [&](const MultiIndex& j, Index lin) {
        Real xb = 1.0;
        for (int k = 0; k < d; ++k) xb *= coord_pow[k](beta[k], j[k]);
        sup = std::max(sup, std::abs(da(lin)) * xb);
      });
      if (sup <= 0.0) continue;
      const Real log_den =
          static_cast<Real>(total_order(alpha) + total_order(beta)) * log_h +
          log_factorial_power(alpha, s) + log_factorial_power(beta, sigma);
      best = std::max(best, std::exp(std::log(sup) - log_den));
    }
  }
  return best;
}

DecayFit stft_decay_fit(const Spectrogram& S, const Weight& omega, Real s) {
  if (!(s > 0.0)) throw ConfigError("stft_decay_fit needs s > 0");
  const int d = S.signal_dim();
  const UniformGrid& phase = S.field.grid();
  const Index total = S.field.size();

  // Per-sample |xi|^{1/s} and log weight at x, plus the log magnitudes
  // of the nonzero samples.
  Eigen::ArrayXd u(total), log_w_at(total);
  Eigen::ArrayXd z_used(total), u_used(total);
  Index used = 0;
  Real peak = 0.0, boundary_peak = 0.0;
  Eigen::VectorXd x(d), xi(d);
  for_each_index(phase.counts, [&](const MultiIndex& j, Index lin) {
    const Real mag = std::abs(S.field(lin));
    peak = std::max(peak, mag);
    bool on_boundary = false;
    for (int k = 0; k < d; ++k) {
      x[k] = phase.coordinate(k, j[k]);
      xi[k] = phase.coordinate(d + k, j[d + k]);
      if (j[d + k] == 0 || j[d + k] == phase.counts[d + k] - 1) {
        on_boundary = true;
      }
    }
    if (on_boundary) boundary_peak = std::max(boundary_peak, mag);
    log_w_at[lin] = omega.log_evaluate(x);
    u[lin] = std::pow(xi.norm(), 1.0 / s);
    if (mag > 0.0) {
      z_used[used] = std::log(mag) - log_w_at[lin];
      u_used[used] = u[lin];
      ++used;
    }
  });
  if (used == 0) {
    throw UndefinedFitError("cannot fit decay of an all-zero spectrogram");
  }
  z_used.conservativeResize(used);
  u_used.conservativeResize(used);

  const Real u_lo = u_used.minCoeff(), u_hi = u_used.maxCoeff();
  const Real z_mean = z_used.mean(), u_mean = u_used.mean();
  const auto slack = [&](Real r) {
    return (z_used + r * u_used).maxCoeff() - z_mean - r * u_mean;
  };

  Real r_fit = 0.0;
  if (u_hi - u_lo > 1e-12) {
    // The mean-slack objective is convex and piecewise linear in r;
    // a coarse sweep brackets its minimum, ternary search refines.
    const Real r_cap =
        4.0 * (z_used.maxCoeff() - z_used.minCoeff()) / (u_hi - u_lo) + 1.0;
    const int sweeps = 64;
    int best_i = 0;
    Real best_v = std::numeric_limits<Real>::infinity();
    for (int i = 0; i <= sweeps; ++i) {
      const Real v = slack(r_cap * static_cast<Real>(i) / sweeps);
      if (v < best_v) {
        best_v = v;
        best_i = i;
      }
    }
    Real lo = r_cap * static_cast<Real>(std::max(0, best_i - 1)) / sweeps;
    Real hi = r_cap * static_cast<Real>(std::min(sweeps, best_i + 1)) / sweeps;
    for (int it = 0; it < 200; ++it) {
      const Real m1 = lo + (hi - lo) / 3.0;
      const Real m2 = hi - (hi - lo) / 3.0;
      if (slack(m1) <= slack(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    r_fit = 0.5 * (lo + hi);
  }
  const Real log_c = (z_used + r_fit * u_used).maxCoeff();

  Eigen::ArrayXcd res(total);
  for (Index lin = 0; lin < total; ++lin) {
    const Real env =
        std::exp(std::min(log_c + log_w_at[lin] - r_fit * u[lin], 700.0));
    res[lin] = Complex(env - std::abs(S.field(lin)), 0.0);
  }
  const Real boundary_level = peak > 0.0 ? boundary_peak / peak : 0.0;
  return DecayFit{std::exp(log_c),
                  r_fit,
                  SampledField(phase, std::move(res)),
                  boundary_level,
                  boundary_level > 1e-10,
                  used};
}

}  // namespace modcalc
