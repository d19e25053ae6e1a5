// SPDX-License-Identifier: Apache-2.0
#include "modcalc/pdo/op.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "modcalc/core/fourier.hpp"
#include "modcalc/core/parallel.hpp"

namespace modcalc {

namespace {

bool vectors_match(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const bool za = a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0;
  const bool zb = b.size() == 0 || b.cwiseAbs().maxCoeff() == 0.0;
  if (za || zb) return za && zb;
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool same_shape(const SymbolTerm& s, const SymbolTerm& t) {
  return s.xpow == t.xpow && s.xipow == t.xipow &&
         vectors_match(s.xmod, t.xmod) && vectors_match(s.ximod, t.ximod) &&
         s.gaussian == t.gaussian &&
         (!s.gaussian || ((s.center.array() == t.center.array()).all() &&
                          (s.sigma.array() == t.sigma.array()).all()));
}

// Collect like terms; coefficients that cancel exactly drop out, so
// polynomial round trips reproduce the input term list bit for bit.
std::vector<SymbolTerm> merge_terms(const std::vector<SymbolTerm>& terms) {
  std::vector<SymbolTerm> out;
  for (const SymbolTerm& t : terms) {
    bool found = false;
    for (SymbolTerm& u : out) {
      if (same_shape(u, t)) {
        u.coef += t.coef;
        found = true;
        break;
      }
    }
    if (!found) out.push_back(t);
  }
  std::erase_if(out, [](const SymbolTerm& t) { return t.coef == 0.0; });
  return out;
}

// One application of L = sum_{jk} B_jk d/dx_j d/dxi_k to a convertible
// term list (no Gaussian factors, no x-side modulations).  The xi
// derivative splits over the monomial and the modulation phase; the x
// derivative lowers the monomial, so total x-degree drops and repeated
// application terminates.
std::vector<SymbolTerm> apply_mixed_derivative(
    const std::vector<SymbolTerm>& terms, const Eigen::MatrixXd& B, int d) {
  std::vector<SymbolTerm> out;
  for (const SymbolTerm& t : terms) {
    for (int j = 0; j < d; ++j) {
      if (t.xpow[j] == 0) continue;  // d/dx_j kills the term
      for (int k = 0; k < d; ++k) {
        if (B(j, k) == 0.0) continue;
        if (t.xipow[k] > 0) {
          SymbolTerm u = t;
          u.coef *= B(j, k) * static_cast<Real>(t.xipow[k]) *
                    static_cast<Real>(t.xpow[j]);
          u.xipow[k] -= 1;
          u.xpow[j] -= 1;
          out.push_back(std::move(u));
        }
        if (t.ximod.size() != 0 && t.ximod[k] != 0.0) {
          SymbolTerm u = t;
          u.coef *= B(j, k) * Complex(0.0, t.ximod[k]) *
                    static_cast<Real>(t.xpow[j]);
          u.xpow[j] -= 1;
          out.push_back(std::move(u));
        }
      }
    }
  }
  return merge_terms(out);
}

Symbol carry_envelope(Symbol b, const Symbol& a) {
  if (a.envelope().valid()) {
    b = b.with_envelope(a.envelope(), a.envelope_order());
  }
  return b;
}

// exp(-i sum_jk B_jk d/dx_j d/dxi_k) as a spectral multiplier
// exp(i <u, B v>) on the phase-space spectrum, u dual to the position
// block and v dual to the frequency block.
SampledField multiplier_deform(const SampledField& data,
                               const Eigen::MatrixXd& B) {
  const int d = static_cast<int>(B.rows());
  SampledField spec = fourier_transform(data);
  const UniformGrid& rg = spec.grid();
  for_each_index(rg.counts, [&](const MultiIndex& j, Index lin) {
    const Eigen::VectorXd dual = rg.point(j);
    const Real angle = dual.head(d).dot(B * dual.tail(d));
    spec(lin) *= std::polar(1.0, angle);
  });
  return inverse_fourier(spec, data.grid());
}

// Shared route for quantization changes and adjoints: apply
// exp(-i sum B_jk d/dx_j d/dxi_k) to the symbol.
Symbol deform_symbol(const Symbol& a, const Eigen::MatrixXd& B,
                     const UniformGrid* phase_grid) {
  const int d = a.dim();
  if (B.cwiseAbs().maxCoeff() == 0.0) return a;

  if (a.closed() && a.series_convertible()) {
    std::vector<SymbolTerm> acc = a.terms();
    std::vector<SymbolTerm> cur = a.terms();
    Complex scale = 1.0;
    for (int n = 1; !cur.empty(); ++n) {
      cur = apply_mixed_derivative(cur, B, d);
      scale *= Complex(0.0, -1.0) / static_cast<Real>(n);
      for (const SymbolTerm& t : cur) {
        SymbolTerm u = t;
        u.coef *= scale;
        acc.push_back(std::move(u));
      }
    }
    return carry_envelope(Symbol::closed_form(merge_terms(acc), d), a);
  }

  if (a.closed()) {
    if (phase_grid == nullptr) {
      throw ConfigError(
          "this symbol leaves the closed-form algebra; supply a "
          "phase-space grid to deform it numerically");
    }
    SampledField data =
        sample(*phase_grid, [&](const Eigen::VectorXd& z) { return a.value(z); });
    Symbol sampled = Symbol::sampled(std::move(data), false,
                                     a.boundary_threshold());
    return deform_symbol(carry_envelope(std::move(sampled), a), B, nullptr);
  }

  if (a.non_decaying()) {
    throw ConfigError(
        "refused: the sampled symbol does not decay at its grid "
        "boundary, so the spectral deformation would wrap its growth");
  }
  return carry_envelope(
      Symbol::sampled(multiplier_deform(a.data(), B), false,
                      a.boundary_threshold()),
      a);
}

void require_identity_basis(const UniformGrid& g) {
  if (!g.basis.is_identity(1e-12)) {
    throw UnsupportedBasisError(
        "operators act on identity-basis signal grids");
  }
}

// Fast path: pivot to A = 0 and pair the symbol with the spectrum,
//   out(x) = (2 pi)^{-d/2} sum_k a0(x, xi_k) fhat(xi_k) e^{i<x,xi_k>} dxi.
SampledField apply_fast(const Symbol& a, const QuantizationSpec& A,
                        const SampledField& f) {
  const UniformGrid& g = f.grid();
  const int d = g.dim();
  const UniformGrid pg = induced_phase_grid(g);

  Symbol a0 = A.is_zero()
                  ? a
                  : change_quantization(a, A,
                                        QuantizationSpec::kohn_nirenberg(d),
                                        &pg);
  if (!a0.closed() && !a0.data().grid().same_layout(pg)) {
    throw AlignmentError(
        "sampled symbols must live on the phase grid induced by the "
        "signal grid");
  }

  const SampledField fhat = fourier_transform(f);
  const UniformGrid& rg = fhat.grid();
  const Index m = rg.size();

  // e^{i <x, xi>} factors over the axes; tabulate each factor once.
  std::vector<Eigen::MatrixXcd> phase(d);
  for (int ax = 0; ax < d; ++ax) {
    phase[ax].resize(g.counts[ax], rg.counts[ax]);
    for (Index j = 0; j < g.counts[ax]; ++j) {
      const Real x = g.coordinate(ax, j);
      for (Index k = 0; k < rg.counts[ax]; ++k) {
        phase[ax](j, k) = std::polar(1.0, x * rg.coordinate(ax, k));
      }
    }
  }

  const Real norm = std::pow(2.0 * std::numbers::pi, -0.5 * d) *
                    rg.cell_volume();
  Eigen::ArrayXcd out(g.size());
  parallel_for(g.size(), [&](Index begin, Index end) {
    MultiIndex j(d);
    Eigen::VectorXd z(2 * d);
    for (Index lin = begin; lin < end; ++lin) {
      unravel_index(g.counts, lin, j);
      for (int ax = 0; ax < d; ++ax) z[ax] = g.coordinate(ax, j[ax]);
      Complex acc = 0.0;
      for_each_index(rg.counts, [&](const MultiIndex& k, Index klin) {
        Complex w = fhat(klin);
        for (int ax = 0; ax < d; ++ax) w *= phase[ax](j[ax], k[ax]);
        if (a0.closed()) {
          for (int ax = 0; ax < d; ++ax) {
            z[d + ax] = rg.coordinate(ax, k[ax]);
          }
          acc += a0.value(z) * w;
        } else {
          acc += a0.data()(lin * m + klin) * w;
        }
      });
      out[lin] = norm * acc;
    }
  });
  return {g, std::move(out)};
}

// Direct double-sum oracle in one dimension.
SampledField apply_quadrature(const Symbol& a, const QuantizationSpec& A,
                              const SampledField& f) {
  const UniformGrid& g = f.grid();
  if (g.dim() != 1) {
    throw ConfigError("the quadrature path handles one dimension");
  }
  const Index n = g.counts[0];
  if (n > 512) {
    throw ConfigError("the quadrature path caps grids at 512 points");
  }
  const UniformGrid rg = reciprocal_grid(g);
  const Real h = g.steps[0];
  const Real dxi = rg.steps[0];
  const Real alpha = A.matrix()(0, 0);

  // P(m, k) = e^{i m h xi_k} for the exact offsets m = i - j.
  Eigen::MatrixXcd P(2 * n - 1, n);
  for (Index m = -(n - 1); m <= n - 1; ++m) {
    for (Index k = 0; k < n; ++k) {
      P(m + n - 1, k) =
          std::polar(1.0, static_cast<Real>(m) * h * rg.coordinate(0, k));
    }
  }

  const Real norm = h / (2.0 * std::numbers::pi);
  Eigen::ArrayXcd out(n);

  if (a.closed()) {
    // Every term factors as X_t(z) Xi_t(xi); integrate the xi factor
    // against the phase table once per offset.
    const std::vector<SymbolTerm>& terms = a.terms();
    const Index nt = static_cast<Index>(terms.size());
    Eigen::MatrixXcd S(2 * n - 1, nt);
    for (Index t = 0; t < nt; ++t) {
      const SymbolTerm& term = terms[t];
      Eigen::VectorXcd xi_factor(n);
      for (Index k = 0; k < n; ++k) {
        const Real xi = rg.coordinate(0, k);
        Real mag = 1.0;
        for (Index p = 0; p < term.xipow[0]; ++p) mag *= xi;
        if (term.gaussian && term.sigma[1] > 0.0) {
          const Real u = (xi - term.center[1]) / term.sigma[1];
          mag *= std::exp(-0.5 * u * u);
        }
        const Real ph = term.ximod.size() != 0 ? term.ximod[0] * xi : 0.0;
        xi_factor[k] = std::polar(mag, ph);
      }
      S.col(t) = P * xi_factor * dxi;
    }
    const auto x_factor = [&](const SymbolTerm& term, Real zv) {
      Real mag = 1.0;
      for (Index p = 0; p < term.xpow[0]; ++p) mag *= zv;
      if (term.gaussian && term.sigma[0] > 0.0) {
        const Real u = (zv - term.center[0]) / term.sigma[0];
        mag *= std::exp(-0.5 * u * u);
      }
      const Real ph = term.xmod.size() != 0 ? term.xmod[0] * zv : 0.0;
      return term.coef * std::polar(mag, ph);
    };
    parallel_for(n, [&](Index begin, Index end) {
      for (Index i = begin; i < end; ++i) {
        const Real x_i = g.coordinate(0, i);
        Complex acc = 0.0;
        for (Index j = 0; j < n; ++j) {
          const Real zv = (1.0 - alpha) * x_i + alpha * g.coordinate(0, j);
          Complex kernel = 0.0;
          for (Index t = 0; t < nt; ++t) {
            kernel += x_factor(terms[t], zv) * S(i - j + n - 1, t);
          }
          acc += f(j) * kernel;
        }
        out[i] = norm * acc;
      }
    });
    return {g, std::move(out)};
  }

  if (!A.is_zero()) {
    throw ConfigError(
        "sampled symbols ride the quadrature path in the pivot "
        "quantization only");
  }
  if (!a.data().grid().same_layout(induced_phase_grid(g))) {
    throw AlignmentError(
        "sampled symbols must live on the phase grid induced by the "
        "signal grid");
  }
  const SampledField& data = a.data();
  parallel_for(n, [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      Complex acc = 0.0;
      for (Index j = 0; j < n; ++j) {
        Complex kernel = 0.0;
        for (Index k = 0; k < n; ++k) {
          kernel += data(i * n + k) * P(i - j + n - 1, k);
        }
        acc += f(j) * kernel * dxi;
      }
      out[i] = norm * acc;
    }
  });
  return {g, std::move(out)};
}

}  // namespace

UniformGrid induced_phase_grid(const UniformGrid& signal_grid) {
  require_identity_basis(signal_grid);
  const UniformGrid rg = reciprocal_grid(signal_grid);
  const int d = signal_grid.dim();
  std::vector<Index> counts = signal_grid.counts;
  counts.insert(counts.end(), rg.counts.begin(), rg.counts.end());
  Eigen::ArrayXd steps(2 * d), offsets(2 * d);
  steps << signal_grid.steps, rg.steps;
  offsets << signal_grid.offsets, rg.offsets;
  return {OrderedBasis::identity(2 * d), std::move(counts), std::move(steps),
          std::move(offsets)};
}

SampledField apply_op(const Symbol& a, const QuantizationSpec& A,
                      const SampledField& f, ApplyMethod method) {
  const UniformGrid& g = f.grid();
  require_identity_basis(g);
  if (a.dim() != g.dim() || A.dim() != g.dim()) {
    throw DimensionError("symbol, quantization and field dimensions differ");
  }
  ensure_finite(f, "operator input");
  return method == ApplyMethod::Fast ? apply_fast(a, A, f)
                                     : apply_quadrature(a, A, f);
}

Symbol change_quantization(const Symbol& a, const QuantizationSpec& from,
                           const QuantizationSpec& to,
                           const UniformGrid* phase_grid) {
  if (from.dim() != a.dim() || to.dim() != a.dim()) {
    throw DimensionError("quantization matrices must match the symbol");
  }
  return deform_symbol(a, from.matrix() - to.matrix(), phase_grid);
}

Symbol adjoint_symbol(const Symbol& a, const UniformGrid* phase_grid) {
  return deform_symbol(a.conjugated(),
                       Eigen::MatrixXd::Identity(a.dim(), a.dim()),
                       phase_grid);
}

}  // namespace modcalc
