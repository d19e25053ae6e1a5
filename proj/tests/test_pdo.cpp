#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <vector>

#include "modcalc/core/fourier.hpp"
#include "modcalc/pdo/gamma.hpp"
#include "modcalc/pdo/op.hpp"
#include "modcalc/pdo/symbol.hpp"

using namespace modcalc;

namespace {

Real rel_l2(const SampledField& got, const SampledField& want) {
  return std::sqrt((got.values() - want.values()).abs2().sum() /
                   want.values().abs2().sum());
}

SampledField gaussian_signal(const UniformGrid& g, Real center = 0.0,
                             Real mod = 0.0) {
  return sample(g, [&](const Eigen::VectorXd& x) {
    const Real u = x[0] - center;
    return std::polar(std::exp(-0.5 * u * u), mod * x[0]);
  });
}

Complex inner(const SampledField& f, const SampledField& g) {
  return (f.values() * g.values().conjugate()).sum() *
         f.grid().cell_volume();
}

SymbolTerm monomial(Complex coef, Index xp, Index xip) {
  SymbolTerm t;
  t.coef = coef;
  t.xpow = {xp};
  t.xipow = {xip};
  return t;
}

Symbol xxi_symbol() { return Symbol::polynomial({monomial(1.0, 1, 1)}, 1); }

// (1 + x^2 + xi^2)^3 expanded by the multinomial theorem.
Symbol cubic_elliptic() {
  return Symbol::polynomial(
      {monomial(1.0, 0, 0), monomial(3.0, 2, 0), monomial(3.0, 0, 2),
       monomial(3.0, 4, 0), monomial(6.0, 2, 2), monomial(3.0, 0, 4),
       monomial(1.0, 6, 0), monomial(3.0, 4, 2), monomial(3.0, 2, 4),
       monomial(1.0, 0, 6)},
      1);
}

Symbol unit_gaussian_symbol(Real wx = 1.0, Real wxi = 1.0) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd w(2);
  w << wx, wxi;
  return Symbol::gaussian_envelope(c, w);
}

Eigen::VectorXd phase_point(Real x, Real xi) {
  Eigen::VectorXd z(2);
  z << x, xi;
  return z;
}

}  // namespace

TEST_CASE("closed symbols evaluate their term algebra") {
  const Symbol c = Symbol::constant(Complex(2.0, -1.0), 2);
  CHECK(c.value(Eigen::VectorXd::Ones(4)) == Complex(2.0, -1.0));
  CHECK(c.closed());
  CHECK(c.dim() == 2);

  const Symbol p = xxi_symbol();
  CHECK(p.value(phase_point(2.0, 3.0)) == 6.0);
  CHECK(p.value(phase_point(-1.0, 0.5)) == -0.5);

  Eigen::VectorXd b(1), q(1);
  b << 0.7;
  q << -1.3;
  const Symbol m = Symbol::modulation(b, q);
  const Complex mv = m.value(phase_point(1.1, 2.3));
  CHECK(std::abs(mv - std::polar(1.0, 0.7 * 1.1 - 1.3 * 2.3)) < 1e-15);

  Eigen::VectorXd ctr(2), wid(2);
  ctr << 0.5, -1.0;
  wid << 1.0, 2.0;
  const Symbol env = Symbol::gaussian_envelope(ctr, wid);
  CHECK(env.value(phase_point(0.5, -1.0)) == 1.0);
  CHECK(std::abs(env.value(phase_point(1.5, -1.0)) - std::exp(-0.5)) <
        1e-15);

  // Separable product: (x e^{i 0.3 x} gauss) * xi^2.
  SymbolTerm u;
  u.coef = 2.0;
  u.xpow = {1};
  u.xmod = Eigen::VectorXd::Constant(1, 0.3);
  u.gaussian = true;
  u.center = Eigen::VectorXd::Zero(1);
  u.sigma = Eigen::VectorXd::Ones(1);
  SymbolTerm w;
  w.xpow = {2};
  const Symbol sep = Symbol::separable({u}, {w}, 1);
  const Real x = 1.2, xi = -0.8;
  const Complex want = 2.0 * x * std::polar(std::exp(-0.5 * x * x), 0.3 * x) *
                       (xi * xi);
  CHECK(std::abs(sep.value(phase_point(x, xi)) - want) < 1e-14);

  SymbolTerm touches_xi;
  touches_xi.xipow = {1};
  CHECK_THROWS_AS(Symbol::separable({touches_xi}, {w}, 1), ConfigError);
  CHECK_THROWS_AS(Symbol::polynomial({u}, 1), ConfigError);
}

TEST_CASE("symbols validate their structure") {
  SymbolTerm bad;
  bad.xpow = {-1};
  CHECK_THROWS_AS(Symbol::closed_form({bad}, 1), ConfigError);

  SymbolTerm wrong_mod;
  wrong_mod.xmod = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(Symbol::closed_form({wrong_mod}, 1), DimensionError);

  SymbolTerm half_gauss;
  half_gauss.gaussian = true;
  half_gauss.center = Eigen::VectorXd::Zero(1);
  half_gauss.sigma = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(Symbol::closed_form({half_gauss}, 1), DimensionError);

  CHECK_THROWS_AS(Symbol::constant(1.0, 0), DimensionError);
  CHECK_THROWS_AS(Symbol::constant(1.0, 1).data(), ConfigError);
  CHECK_THROWS_AS(
      Symbol::constant(1.0, 1).with_envelope(Weight::one(2), 0.0),
      ConfigError);
  CHECK_THROWS_AS(
      Symbol::constant(1.0, 1).with_envelope(Weight::one(3), 1.0),
      DimensionError);
}

TEST_CASE("series convertibility tracks the term features") {
  CHECK(xxi_symbol().series_convertible());
  CHECK(cubic_elliptic().series_convertible());

  Eigen::VectorXd h1 = Eigen::VectorXd::Constant(1, 0.4);
  CHECK(Symbol::modulation(Eigen::VectorXd::Zero(1), h1)
            .series_convertible());
  CHECK_FALSE(Symbol::modulation(h1, Eigen::VectorXd::Zero(1))
                  .series_convertible());
  CHECK_FALSE(unit_gaussian_symbol().series_convertible());
}

TEST_CASE("conjugation flips values pointwise") {
  SymbolTerm t;
  t.coef = Complex(0.3, -0.9);
  t.xpow = {2};
  t.ximod = Eigen::VectorXd::Constant(1, 1.7);
  t.gaussian = true;
  t.center = Eigen::VectorXd::Zero(2);
  t.sigma = Eigen::VectorXd::Ones(2);
  const Symbol a = Symbol::closed_form({t, monomial(Complex(0, 1), 0, 1)}, 1);
  const Symbol b = a.conjugated();
  for (const Real x : {-1.3, 0.2, 2.0}) {
    const Eigen::VectorXd z = phase_point(x, 0.6 * x - 1.0);
    CHECK(std::abs(b.value(z) - std::conj(a.value(z))) < 1e-15);
  }
}

TEST_CASE("sampled symbols interpolate and guard their boundary") {
  const UniformGrid pg = UniformGrid::centered(2, 16, 8.0);
  const Symbol env = unit_gaussian_symbol();
  const SampledField data =
      sample(pg, [&](const Eigen::VectorXd& z) { return env.value(z); });
  const Symbol a = Symbol::sampled(data);
  CHECK(a.kind() == SymbolKind::Sampled);
  CHECK(a.dim() == 1);
  CHECK(a.boundary_ratio() < 1e-6);

  // Exact at nodes, averaged midway along one axis, zero far outside.
  const MultiIndex node{8, 9};
  CHECK(a.value(pg.point(node)) == data.at(node));
  Eigen::VectorXd mid = pg.point(node);
  mid[1] += 0.5 * pg.steps[1];
  const Complex avg = 0.5 * (data.at({8, 9}) + data.at({8, 10}));
  CHECK(std::abs(a.value(mid) - avg) < 1e-15);
  CHECK(a.value(phase_point(40.0, 0.0)) == 0.0);

  SampledField ones(pg, Eigen::ArrayXcd::Ones(pg.size()));
  CHECK_THROWS_AS(Symbol::sampled(ones), ConfigError);
  const Symbol flat = Symbol::sampled(ones, true);
  CHECK(flat.non_decaying());
  CHECK(flat.boundary_ratio() == 1.0);

  Eigen::MatrixXd shear = Eigen::MatrixXd::Identity(2, 2);
  shear(0, 1) = 1.0;
  const UniformGrid skewed(OrderedBasis(shear), {4, 4},
                           Eigen::ArrayXd::Ones(2), Eigen::ArrayXd::Zero(2));
  CHECK_THROWS_AS(Symbol::sampled(SampledField(skewed)),
                  UnsupportedBasisError);
  const UniformGrid odd = UniformGrid::centered(3, 4, 2.0);
  CHECK_THROWS_AS(Symbol::sampled(SampledField(odd)), DimensionError);
}

TEST_CASE("symbols round trip through json and files") {
  SymbolTerm t;
  t.coef = Complex(1.25, -0.5);
  t.xpow = {1};
  t.xipow = {2};
  t.xmod = Eigen::VectorXd::Constant(1, 0.6);
  t.gaussian = true;
  t.center = phase_point(0.5, -0.25);
  t.sigma = phase_point(1.0, 2.0);
  const Symbol a = Symbol::closed_form({t, monomial(3.0, 0, 1)}, 1)
                       .with_envelope(Weight::polynomial(2.0, 2), 1.5);

  const Symbol back = Symbol::from_json(a.to_json());
  CHECK(back.terms().size() == 2);
  CHECK(back.envelope().valid());
  CHECK(back.envelope_order() == 1.5);
  for (const Real x : {-0.7, 0.4}) {
    const Eigen::VectorXd z = phase_point(x, 1.0 - x);
    CHECK(back.value(z) == a.value(z));
  }

  namespace fs = std::filesystem;
  const std::string closed_path =
      (fs::temp_directory_path() / "modcalc_symb_closed.bin").string();
  save_symbol(a, closed_path);
  const Symbol from_file = load_symbol(closed_path);
  CHECK(from_file.closed());
  CHECK(from_file.value(phase_point(0.3, 0.9)) ==
        a.value(phase_point(0.3, 0.9)));
  CHECK(from_file.envelope_order() == 1.5);

  const UniformGrid pg = UniformGrid::centered(2, 12, 8.0);
  const Symbol samp = Symbol::sampled(
      sample(pg, [&](const Eigen::VectorXd& z) {
        return unit_gaussian_symbol().value(z);
      }),
      false, 1e-5);
  const std::string samp_path =
      (fs::temp_directory_path() / "modcalc_symb_samp.bin").string();
  save_symbol(samp, samp_path);
  const Symbol samp_back = load_symbol(samp_path);
  CHECK(samp_back.kind() == SymbolKind::Sampled);
  CHECK(samp_back.boundary_threshold() == 1e-5);
  CHECK(samp_back.data().grid().same_layout(pg));
  CHECK((samp_back.data().values() == samp.data().values()).all());
  fs::remove(closed_path);
  fs::remove(samp_path);

  CHECK_THROWS_AS(Symbol::from_json({{"kind", "mystery"}}), ConfigError);
  CHECK_THROWS_AS(Symbol::from_json({{"kind", "closed"}}), ConfigError);
}

TEST_CASE("operators with trivial symbols act as the identity") {
  const UniformGrid g = UniformGrid::centered(1, 128, 8.0);
  const SampledField f = gaussian_signal(g, 0.4, 1.3);
  const SampledField out =
      apply_op(Symbol::constant(1.0, 1), QuantizationSpec::kohn_nirenberg(1),
               f);
  CHECK(rel_l2(out, f) < 1e-10);

  const UniformGrid g2 = UniformGrid::centered(2, 24, 6.0);
  const SampledField f2 = sample(g2, [](const Eigen::VectorXd& x) {
    return std::exp(-0.5 * x.squaredNorm());
  });
  const SampledField out2 =
      apply_op(Symbol::constant(1.0, 2), QuantizationSpec::weyl(2), f2);
  CHECK(rel_l2(out2, f2) < 1e-10);
}

TEST_CASE("frequency symbols differentiate and shift") {
  const UniformGrid g = UniformGrid::centered(1, 128, 8.0);
  const SampledField f = gaussian_signal(g, -0.3, 0.8);
  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);

  const Symbol xi = Symbol::polynomial({monomial(1.0, 0, 1)}, 1);
  SampledField dfa = spectral_derivative(f, {1});
  dfa.values() *= Complex(0.0, -1.0);
  CHECK(rel_l2(apply_op(xi, kn, f), dfa) < 1e-8);

  const Real h = 2.0 * g.steps[0];
  const Symbol shift =
      Symbol::modulation(Eigen::VectorXd::Zero(1),
                         Eigen::VectorXd::Constant(1, h));
  const SampledField shifted = apply_op(shift, kn, f);
  for (Index j = 8; j < 118; ++j) {
    CHECK(std::abs(shifted(j) - f(j + 2)) < 1e-8);
  }

  const Symbol x2 = Symbol::polynomial({monomial(1.0, 2, 0)}, 1);
  const SampledField mul = apply_op(x2, kn, f);
  const SampledField want = sample(g, [&](const Eigen::VectorXd& x) {
    return x[0] * x[0] *
           std::polar(std::exp(-0.5 * (x[0] + 0.3) * (x[0] + 0.3)),
                      0.8 * x[0]);
  });
  CHECK(rel_l2(mul, want) < 1e-9);
}

TEST_CASE("the quadrature path reproduces the identity exactly") {
  const UniformGrid g = UniformGrid::centered(1, 64, 6.0);
  const SampledField f = gaussian_signal(g, 0.7, -1.1);
  const SampledField out =
      apply_op(Symbol::constant(1.0, 1), QuantizationSpec::kohn_nirenberg(1),
               f, ApplyMethod::Quadrature);
  CHECK(rel_l2(out, f) < 1e-11);
}

TEST_CASE("the quadrature path rejects what it cannot honor") {
  const QuantizationSpec kn1 = QuantizationSpec::kohn_nirenberg(1);
  const UniformGrid g2 = UniformGrid::centered(2, 8, 4.0);
  CHECK_THROWS_AS(apply_op(Symbol::constant(1.0, 2),
                           QuantizationSpec::kohn_nirenberg(2),
                           SampledField(g2), ApplyMethod::Quadrature),
                  ConfigError);

  const UniformGrid big = UniformGrid::centered(1, 600, 8.0);
  CHECK_THROWS_AS(apply_op(Symbol::constant(1.0, 1), kn1, SampledField(big),
                           ApplyMethod::Quadrature),
                  ConfigError);

  const UniformGrid g = UniformGrid::centered(1, 32, 6.0);
  const Symbol samp = Symbol::sampled(
      sample(induced_phase_grid(g), [&](const Eigen::VectorXd& z) {
        return unit_gaussian_symbol().value(z);
      }));
  const SampledField f = gaussian_signal(g);
  CHECK_THROWS_AS(
      apply_op(samp, QuantizationSpec::weyl(1), f, ApplyMethod::Quadrature),
      ConfigError);

  const UniformGrid other = UniformGrid::centered(1, 24, 6.0);
  const SampledField f_other = gaussian_signal(other);
  CHECK_THROWS_AS(apply_op(samp, kn1, f_other, ApplyMethod::Quadrature),
                  AlignmentError);
}

TEST_CASE("the fast and quadrature paths agree") {
  const UniformGrid g = UniformGrid::centered(1, 128, 10.0);
  const SampledField f = gaussian_signal(g, 0.3, 1.1);
  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);
  const QuantizationSpec weyl = QuantizationSpec::weyl(1);

  SUBCASE("polynomial symbol in the symmetric quantization") {
    const Symbol a = xxi_symbol();
    CHECK(rel_l2(apply_op(a, weyl, f),
                 apply_op(a, weyl, f, ApplyMethod::Quadrature)) < 1e-6);
  }
  SUBCASE("elliptic polynomial at the pivot") {
    const Symbol a = Symbol::polynomial(
        {monomial(1.0, 0, 0), monomial(1.0, 2, 0), monomial(1.0, 0, 2)}, 1);
    CHECK(rel_l2(apply_op(a, kn, f),
                 apply_op(a, kn, f, ApplyMethod::Quadrature)) < 1e-6);
  }
  SUBCASE("gaussian envelope at the pivot") {
    const Symbol a = unit_gaussian_symbol(1.5, 2.0);
    CHECK(rel_l2(apply_op(a, kn, f),
                 apply_op(a, kn, f, ApplyMethod::Quadrature)) < 1e-6);
  }
  SUBCASE("gaussian envelope in the symmetric quantization") {
    const Symbol a = unit_gaussian_symbol(1.5, 2.0);
    CHECK(rel_l2(apply_op(a, weyl, f),
                 apply_op(a, weyl, f, ApplyMethod::Quadrature)) < 1e-6);
  }
}

TEST_CASE("quantization changes form a consistent calculus") {
  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);
  const QuantizationSpec weyl = QuantizationSpec::weyl(1);
  const QuantizationSpec full(Eigen::MatrixXd::Identity(1, 1));

  SUBCASE("equal quantizations change nothing") {
    const Symbol b = change_quantization(xxi_symbol(), kn, kn);
    REQUIRE(b.terms().size() == 1);
    CHECK(b.terms()[0].coef == 1.0);
  }
  SUBCASE("the symmetric form of x xi gains the exact half unit") {
    const Symbol b = change_quantization(xxi_symbol(), kn, weyl);
    CHECK(b.value(phase_point(0.0, 0.0)) == Complex(0.0, 0.5));
    CHECK(b.value(phase_point(2.0, 3.0)) == Complex(6.0, 0.5));
    const Symbol back = change_quantization(b, weyl, kn);
    REQUIRE(back.terms().size() == 1);
    CHECK(back.terms()[0].coef == 1.0);
    CHECK(back.terms()[0].xpow == MultiIndex{1});
    CHECK(back.terms()[0].xipow == MultiIndex{1});
  }
  SUBCASE("x-independent symbols are fixed points") {
    const Symbol a = Symbol::polynomial(
        {monomial(1.0, 0, 0), monomial(1.0, 0, 2)}, 1);
    const Symbol b = change_quantization(a, kn, weyl);
    REQUIRE(b.terms().size() == 2);
    CHECK(b.value(phase_point(1.3, -2.0)) == a.value(phase_point(1.3, -2.0)));
  }
  SUBCASE("sampled round trips and compositions stay close") {
    const UniformGrid pg = UniformGrid::centered(2, 64, 8.0);
    const Symbol a = unit_gaussian_symbol();
    const Symbol b1 = change_quantization(a, kn, weyl, &pg);
    REQUIRE_FALSE(b1.closed());
    const SampledField direct =
        sample(pg, [&](const Eigen::VectorXd& z) { return a.value(z); });
    const Symbol back = change_quantization(b1, weyl, kn, &pg);
    CHECK(rel_l2(back.data(), direct) < 1e-8);

    const Symbol two_steps =
        change_quantization(b1, weyl, full, &pg);
    const Symbol one_step = change_quantization(a, kn, full, &pg);
    CHECK(rel_l2(two_steps.data(), one_step.data()) < 1e-8);
  }
  SUBCASE("operators agree across quantizations") {
    const UniformGrid g = UniformGrid::centered(1, 128, 10.0);
    const SampledField f = gaussian_signal(g, -0.2, 0.9);
    const Symbol a = Symbol::polynomial(
        {monomial(1.0, 2, 0), monomial(1.0, 0, 2), monomial(0.5, 1, 1)}, 1);
    const SampledField via_pivot = apply_op(a, kn, f);
    const SampledField via_weyl = apply_op(change_quantization(a, kn, weyl),
                                           weyl, f, ApplyMethod::Quadrature);
    CHECK(rel_l2(via_weyl, via_pivot) < 1e-6);
  }
  SUBCASE("linearity of the symbol map") {
    const UniformGrid g = UniformGrid::centered(1, 96, 8.0);
    const SampledField f = gaussian_signal(g, 0.1, -0.4);
    const Symbol a = xxi_symbol();
    const Symbol b = Symbol::polynomial({monomial(1.0, 0, 2)}, 1);
    const Symbol sum = Symbol::polynomial(
        {monomial(2.0, 1, 1), monomial(1.0, 0, 2)}, 1);
    const SampledField lhs = apply_op(sum, weyl, f);
    SampledField rhs = apply_op(a, weyl, f);
    rhs.values() = 2.0 * rhs.values() + apply_op(b, weyl, f).values();
    CHECK(rel_l2(lhs, rhs) < 1e-12);
  }
  SUBCASE("refusals") {
    CHECK_THROWS_AS(change_quantization(unit_gaussian_symbol(), kn, weyl),
                    ConfigError);
    const UniformGrid pg = UniformGrid::centered(2, 8, 4.0);
    SampledField ones(pg, Eigen::ArrayXcd::Ones(pg.size()));
    const Symbol flat = Symbol::sampled(ones, true);
    CHECK_THROWS_AS(change_quantization(flat, kn, weyl), ConfigError);
    CHECK_THROWS_AS(
        change_quantization(xxi_symbol(), kn, QuantizationSpec::weyl(2)),
        DimensionError);
  }
}

TEST_CASE("adjoint symbols transpose the operator") {
  const Symbol x = Symbol::polynomial({monomial(1.0, 1, 0)}, 1);
  CHECK(adjoint_symbol(x).value(phase_point(1.7, 0.2)) == 1.7);

  const Symbol b = adjoint_symbol(xxi_symbol());
  CHECK(b.value(phase_point(0.0, 0.0)) == Complex(0.0, -1.0));
  CHECK(b.value(phase_point(1.0, 1.0)) == Complex(1.0, -1.0));

  const Real h = 0.6;
  const Symbol shift = Symbol::modulation(
      Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, h));
  const Complex sv = adjoint_symbol(shift).value(phase_point(0.0, 1.0));
  CHECK(std::abs(sv - std::polar(1.0, -h)) < 1e-15);

  const UniformGrid g = UniformGrid::centered(1, 128, 10.0);
  const SampledField f = gaussian_signal(g, 0.5, 1.2);
  const SampledField w = gaussian_signal(g, -0.4, -0.7);
  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);

  const Complex lhs = inner(apply_op(xxi_symbol(), kn, f), w);
  const Complex rhs = inner(f, apply_op(b, kn, w));
  CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-6);

  const UniformGrid pg = induced_phase_grid(g);
  const Symbol env = unit_gaussian_symbol(1.0, 2.0);
  const Symbol env_adj = adjoint_symbol(env, &pg);
  REQUIRE_FALSE(env_adj.closed());
  const Complex lhs2 = inner(apply_op(env, kn, f), w);
  const Complex rhs2 = inner(f, apply_op(env_adj, kn, w));
  CHECK(std::abs(lhs2 - rhs2) / std::abs(rhs2) < 1e-6);
}

TEST_CASE("gamma membership reads derivative envelopes") {
  const Symbol one = Symbol::constant(1.0, 1);
  const GammaReport flat =
      gamma_membership(one, Weight::one(2), 1.0, GammaMode::Derivative);
  CHECK(flat.mode == "derivative");
  CHECK(flat.verdict == "Roumieu-consistent");
  CHECK(flat.C == doctest::Approx(1.0));
  REQUIRE(flat.derivative.orders.size() >= 2);
  CHECK(flat.derivative.orders[0].log_envelope == 0.0);
  CHECK(flat.derivative.orders[1].log_envelope ==
        -std::numeric_limits<Real>::infinity());
  CHECK(flat.derivative.orders[1].finite);

  // Every derivative of the degree-6 polynomial fits below the
  // degree-6 weight, and orders above six would vanish: the constants
  // keep improving down the sweep.
  const GammaReport poly = gamma_membership(
      cubic_elliptic(), Weight::polynomial(6.0, 2), 1.0,
      GammaMode::Derivative);
  CHECK(poly.verdict == "Beurling-trend");
  CHECK(poly.C == doctest::Approx(1.0));
  CHECK(poly.derivative.pass);
  REQUIRE(poly.derivative.orders.size() == 7);
  for (const GevreyOrderStat& st : poly.derivative.orders) {
    CHECK(std::isfinite(st.log_envelope));
  }
  CHECK(poly.to_json().contains("derivative"));

  // A Gaussian symbol against its own profile as the weight: the
  // Hermite-factor growth fits a finite (C, h) at every order.
  const UniformGrid pg = UniformGrid::centered(2, 32, 8.0);
  const Weight matching = Weight::tabulated(sample(
      pg, [](const Eigen::VectorXd& z) { return std::exp(-0.5 * z.squaredNorm()); }));
  const GammaReport gauss = gamma_membership(
      unit_gaussian_symbol(), matching, 1.0, GammaMode::Derivative);
  CHECK(std::isfinite(gauss.C));
  CHECK(gauss.rate > 0.0);
  CHECK(gauss.derivative.pass);
}

TEST_CASE("gamma membership fits spectrogram decay") {
  const Symbol env = unit_gaussian_symbol();
  const GammaReport rep =
      gamma_membership(env, Weight::one(2), 1.0, GammaMode::Stft);
  CHECK(rep.mode == "stft");
  CHECK(std::isfinite(rep.C));
  CHECK(rep.rate > 0.0);
  REQUIRE(rep.sweep_rate.size() == 4);
  REQUIRE(rep.sweep_log_C.size() == 4);
  CHECK(rep.sweep_rate[3] == doctest::Approx(3.0 * rep.rate));
  CHECK(rep.sweep_log_C[3] >= rep.sweep_log_C[0]);
  const nlohmann::json j = rep.to_json();
  CHECK(j.contains("boundary_level"));
  CHECK(j.contains("sweep_log_C"));

  GammaOptions big;
  big.samples_per_axis = 100;
  CHECK_THROWS_AS(
      gamma_membership(env, Weight::one(2), 1.0, GammaMode::Stft, big),
      ConfigError);
}

TEST_CASE("gamma membership validates its inputs") {
  CHECK_THROWS_AS(gamma_membership(Symbol::constant(1.0, 2), Weight::one(4),
                                   1.0, GammaMode::Derivative),
                  DimensionError);
  CHECK_THROWS_AS(gamma_membership(Symbol::constant(1.0, 1), Weight::one(1),
                                   1.0, GammaMode::Derivative),
                  DimensionError);
  CHECK_THROWS_AS(gamma_membership(Symbol::constant(1.0, 1), Weight::one(2),
                                   0.0, GammaMode::Derivative),
                  ConfigError);
}

TEST_CASE("gamma verdicts agree across quantizations") {
  const std::vector<QuantizationSpec> all = {
      QuantizationSpec::kohn_nirenberg(1), QuantizationSpec::weyl(1),
      QuantizationSpec(Eigen::MatrixXd::Identity(1, 1))};
  const QuantizationInvarianceReport trivial = quantization_invariance_check(
      Symbol::constant(1.0, 1), Weight::one(2), 1.0, all);
  CHECK(trivial.agree);
  REQUIRE(trivial.reports.size() == 3);
  CHECK(trivial.quantizations[1](0, 0) == 0.5);
  CHECK(trivial.reports[0].verdict == trivial.reports[2].verdict);

  const QuantizationInvarianceReport prod = quantization_invariance_check(
      xxi_symbol(), Weight::polynomial(2.0, 2), 1.0,
      {QuantizationSpec::kohn_nirenberg(1), QuantizationSpec::weyl(1)});
  CHECK(prod.agree);
  CHECK(prod.to_json().at("entries").size() == 2);

  CHECK_THROWS_AS(quantization_invariance_check(xxi_symbol(), Weight::one(2),
                                                1.0, {}),
                  ConfigError);
}
