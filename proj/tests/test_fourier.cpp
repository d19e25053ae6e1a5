#include <doctest.h>

#include <numbers>

#include "modcalc/core/fourier.hpp"

using namespace modcalc;

namespace {

SampledField gaussian_field(const UniformGrid& g, Real center = 0.0,
                            Real modulation = 0.0) {
  return sample(g, [=](const Eigen::VectorXd& x) {
    const Real u = x[0] - center;
    return std::exp(-0.5 * u * u) * std::polar(1.0, modulation * x[0]);
  });
}

}  // namespace

TEST_CASE("gaussian transforms to itself") {
  auto g = UniformGrid::centered(1, 256, 12.0);
  SampledField F = fourier_transform(gaussian_field(g));
  Real max_err = 0.0;
  for_each_index(F.grid().counts, [&](const MultiIndex& j, Index lin) {
    const Real xi = F.grid().coordinate(0, j[0]);
    max_err = std::max(max_err, std::abs(F(lin) - Complex(std::exp(-0.5 * xi * xi))));
  });
  CHECK(max_err < 1e-10);
}

TEST_CASE("zero maps to zero and linearity holds") {
  auto g = UniformGrid::centered(1, 64, 8.0);
  SampledField z(g);
  CHECK(fourier_transform(z).values().abs().maxCoeff() == 0.0);

  SampledField a = gaussian_field(g, 1.0);
  SampledField b = gaussian_field(g, -0.5, 2.0);
  SampledField combo(g, Complex(2.0, 1.0) * a.values() + Complex(0.0, -3.0) * b.values());
  Eigen::ArrayXcd direct = fourier_transform(combo).values();
  Eigen::ArrayXcd sum = Complex(2.0, 1.0) * fourier_transform(a).values() +
                        Complex(0.0, -3.0) * fourier_transform(b).values();
  CHECK((direct - sum).abs().maxCoeff() / sum.abs().maxCoeff() < 1e-13);
}

TEST_CASE("modulated gaussian peaks at the modulation frequency") {
  auto g = UniformGrid::centered(1, 256, 12.0);
  SampledField F = fourier_transform(gaussian_field(g, 0.0, 3.0));
  Real max_err = 0.0;
  Index peak = 0;
  Real peak_val = 0.0;
  for_each_index(F.grid().counts, [&](const MultiIndex& j, Index lin) {
    const Real xi = F.grid().coordinate(0, j[0]);
    const Real expect = std::exp(-0.5 * (xi - 3.0) * (xi - 3.0));
    max_err = std::max(max_err, std::abs(F(lin) - Complex(expect)));
    if (std::abs(F(lin)) > peak_val) {
      peak_val = std::abs(F(lin));
      peak = j[0];
    }
  });
  CHECK(max_err < 1e-10);
  CHECK(F.grid().coordinate(0, peak) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("direct quadrature agrees with the transform at probe bins") {
  auto g = UniformGrid::centered(1, 192, 10.0);
  SampledField f = sample(g, [](const Eigen::VectorXd& x) {
    return std::exp(-0.4 * x[0] * x[0]) * Complex(std::cos(x[0]), 0.3);
  });
  SampledField F = fourier_transform(f);
  const Real scale = std::pow(2.0 * std::numbers::pi, -0.5) * g.cell_volume();
  for (Index probe : {0L, 17L, 96L, 140L, 191L}) {
    const Real xi = F.grid().coordinate(0, probe);
    Complex acc = 0.0;
    for (Index j = 0; j < g.size(); ++j) {
      acc += f(j) * std::polar(1.0, -g.coordinate(0, j) * xi);
    }
    CHECK(std::abs(F(probe) - scale * acc) < 1e-11);
  }
}

TEST_CASE("round trips are exact to rounding") {
  auto g = UniformGrid::centered(1, 256, 12.0);
  SampledField f = gaussian_field(g, 0.7, -1.3);
  SampledField back = inverse_fourier(fourier_transform(f));
  CHECK(back.grid().same_layout(g));
  const Real rel = std::sqrt((back.values() - f.values()).abs2().sum() /
                             f.values().abs2().sum());
  CHECK(rel < 1e-12);

  SampledField zero_spec(reciprocal_grid(g));
  CHECK(inverse_fourier(zero_spec).values().abs().maxCoeff() == 0.0);
}

TEST_CASE("band-limited random field round trips") {
  auto g = UniformGrid::centered(1, 128, 10.0);
  UniformGrid fg = reciprocal_grid(g);
  SampledField spec(fg);
  // Populate only |xi| < Nyquist/4, deterministic pseudo-random phases.
  uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<Real>(state >> 11) * 0x1p-53;
  };
  const Real cutoff = 0.25 * std::abs(fg.coordinate(0, 0));
  for (Index q = 0; q < fg.size(); ++q) {
    if (std::abs(fg.coordinate(0, q)) < cutoff) {
      spec(q) = Complex(next() - 0.5, next() - 0.5);
    }
  }
  SampledField f = inverse_fourier(spec, g);
  SampledField back = inverse_fourier(fourier_transform(f), g);
  const Real rel = std::sqrt((back.values() - f.values()).abs2().sum() /
                             f.values().abs2().sum());
  CHECK(rel < 1e-9);
  // The forward transform also recovers the constructed spectrum.
  const Real spec_rel =
      std::sqrt((fourier_transform(f).values() - spec.values()).abs2().sum() /
                spec.values().abs2().sum());
  CHECK(spec_rel < 1e-9);
}

TEST_CASE("parseval on the discrete grid") {
  auto g = UniformGrid::centered(1, 192, 12.0);
  SampledField f = gaussian_field(g, -2.0, 5.0);
  SampledField F = fourier_transform(f);
  CHECK(F.squared_l2() == doctest::Approx(f.squared_l2()).epsilon(1e-10));
}

TEST_CASE("offset grids carry the continuum phase") {
  // Same physical samples, but the grid starts at 0 instead of being
  // centered: the transform must match e^{-xi^2/2} e^{-i x0 xi}.
  const Index n = 256;
  const Real h = 24.0 / static_cast<Real>(n);
  UniformGrid g(OrderedBasis::identity(1), {n}, Eigen::ArrayXd::Constant(1, h),
                Eigen::ArrayXd::Constant(1, 0.5 * h));
  const Real x0 = 12.0;  // Gaussian centered mid-box
  SampledField f = sample(g, [&](const Eigen::VectorXd& x) {
    return Complex(std::exp(-0.5 * (x[0] - x0) * (x[0] - x0)));
  });
  SampledField F = fourier_transform(f);
  Real max_err = 0.0;
  for (Index q = 0; q < F.size(); ++q) {
    const Real xi = F.grid().coordinate(0, q);
    const Complex expect =
        std::exp(-0.5 * xi * xi) * std::polar(1.0, -x0 * xi);
    max_err = std::max(max_err, std::abs(F(q) - expect));
  }
  CHECK(max_err < 1e-10);
  // Round trip back onto the offset grid.
  SampledField back = inverse_fourier(F, g);
  CHECK(std::sqrt((back.values() - f.values()).abs2().sum() /
                  f.values().abs2().sum()) < 1e-12);
}

TEST_CASE("two-dimensional transform separates") {
  auto g = UniformGrid::centered(2, 64, 8.0);
  SampledField f = sample(g, [](const Eigen::VectorXd& x) {
    return Complex(std::exp(-0.5 * (x[0] * x[0] + 2.0 * x[1] * x[1])));
  });
  SampledField F = fourier_transform(f);
  Real max_err = 0.0;
  for_each_index(F.grid().counts, [&](const MultiIndex& j, Index lin) {
    const Real xi0 = F.grid().coordinate(0, j[0]);
    const Real xi1 = F.grid().coordinate(1, j[1]);
    // Product of 1-d closed forms; the xi1 factor picks up 1/sqrt(2).
    const Real expect = std::exp(-0.5 * xi0 * xi0) *
                        std::exp(-0.25 * xi1 * xi1) / std::sqrt(2.0);
    max_err = std::max(max_err, std::abs(F(lin) - Complex(expect)));
  });
  CHECK(max_err < 1e-10);
  SampledField back = inverse_fourier(F);
  CHECK(std::sqrt((back.values() - f.values()).abs2().sum() /
                  f.values().abs2().sum()) < 1e-12);
}

TEST_CASE("identity basis required") {
  Eigen::MatrixXd shear(2, 2);
  shear << 1, 1, 0, 1;
  UniformGrid g(OrderedBasis(shear), {8, 8}, Eigen::ArrayXd::Ones(2),
                Eigen::ArrayXd::Zero(2));
  SampledField f(g);
  CHECK_THROWS_AS(fourier_transform(f), UnsupportedBasisError);
}

TEST_CASE("nan input rejected") {
  auto g = UniformGrid::centered(1, 16, 4.0);
  SampledField f(g);
  f(5) = Complex(0.0, std::nan(""));
  CHECK_THROWS_AS(fourier_transform(f), InvalidFieldError);
}

TEST_CASE("spectral derivatives match closed forms") {
  // sin on a commensurate box so the periodization is exact.
  auto g = UniformGrid::centered(1, 256, 4.0 * std::numbers::pi);
  SampledField f = sample(g, [](const Eigen::VectorXd& x) {
    return Complex(std::sin(x[0]));
  });
  for (Index order : {1L, 2L, 3L, 5L, 7L}) {
    SampledField df = spectral_derivative(f, {order});
    Real max_err = 0.0;
    for (Index j = 0; j < g.size(); ++j) {
      const Real x = g.coordinate(0, j);
      const Real expect = std::sin(x + 0.5 * std::numbers::pi * order);
      max_err = std::max(max_err, std::abs(df(j) - Complex(expect)));
    }
    // Round-off at the outermost bins grows like xi_max^order * eps.
    const Real tol = 3e-14 * std::pow(32.0, static_cast<Real>(order));
    CHECK(max_err < std::max(tol, 1e-12));
  }

  auto gg = UniformGrid::centered(1, 256, 12.0);
  SampledField gauss = sample(gg, [](const Eigen::VectorXd& x) {
    return Complex(std::exp(-0.5 * x[0] * x[0]));
  });
  SampledField d2 = spectral_derivative(gauss, {2});
  Real max_err = 0.0;
  for (Index j = 0; j < gg.size(); ++j) {
    const Real x = gg.coordinate(0, j);
    const Real expect = (x * x - 1.0) * std::exp(-0.5 * x * x);
    max_err = std::max(max_err, std::abs(d2(j) - Complex(expect)));
  }
  CHECK(max_err < 1e-9);
}

TEST_CASE("order guard refuses noise-dominated derivatives") {
  auto g = UniformGrid::centered(1, 256, 4.0 * std::numbers::pi);
  SampledField f = sample(g, [](const Eigen::VectorXd& x) {
    return Complex(std::sin(x[0]));
  });
  CHECK_THROWS_AS(spectral_derivative(f, {12}), OrderTooHighError);
}
