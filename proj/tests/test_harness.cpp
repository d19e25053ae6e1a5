#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include "modcalc/harness/scenarios.hpp"
#include "modcalc/norms/modulation.hpp"

using namespace modcalc;

namespace {

UniformGrid line_grid(Index n, Real half_width = 8.0) {
  return UniformGrid::centered(1, n, half_width);
}

EnsembleSpec chirp_spec(int count, std::uint64_t seed) {
  EnsembleSpec s;
  s.kind = EnsembleKind::GaussianChirps;
  s.count = count;
  s.seed = seed;
  return s;
}

Symbol envelope_symbol() {
  return Symbol::gaussian_envelope(Eigen::Vector2d::Zero(),
                                   Eigen::Vector2d::Ones());
}

Symbol frequency_symbol() {
  SymbolTerm t;
  t.xipow = {1};
  return Symbol::closed_form({t}, 1);
}

ModSpaceSpec flat_l22(Real sigma = 1.0) {
  return ModSpaceSpec::lpq1(2.0, 2.0, Weight::one(2),
                            Window::gaussian(sigma, 1));
}

void use_fixture_dir(const char* name) {
  std::filesystem::remove_all(name);
  setenv("MODCALC_FIXTURES", name, 1);
}

std::string fixture_state(const ScenarioResult& r) {
  return r.diagnostics.at("fixture").at("state").get<std::string>();
}

}  // namespace

TEST_CASE("ensembles are deterministic and monotone") {
  const UniformGrid g = line_grid(48);
  const EnsembleSpec spec = chirp_spec(8, 17);
  const Ensemble a = make_ensemble(spec, g);
  const Ensemble b = make_ensemble(spec, g);
  REQUIRE(a.members.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK((a.members[i].values() == b.members[i].values()).all());
    CHECK(a.members[i].l2_norm() > 0.0);
  }

  const Ensemble small = make_ensemble(chirp_spec(4, 17), g);
  for (int i = 0; i < 4; ++i) {
    CHECK((small.members[i].values() == a.members[i].values()).all());
  }

  EnsembleSpec hm = spec;
  hm.kind = EnsembleKind::HermiteMix;
  EnsembleSpec gc = spec;
  gc.kind = EnsembleKind::GaborCloud;
  for (const EnsembleSpec& s : {hm, gc}) {
    const Ensemble e = make_ensemble(s, g);
    for (const SampledField& f : e.members) {
      CHECK(f.all_finite());
      CHECK(f.l2_norm() > 0.0);
    }
  }
}

TEST_CASE("ensemble specs round trip through json and validate") {
  EnsembleSpec s = chirp_spec(5, 99);
  s.kind = EnsembleKind::GaborCloud;
  const EnsembleSpec back = EnsembleSpec::from_json(s.to_json());
  CHECK(back.to_json().dump() == s.to_json().dump());

  CHECK_THROWS_AS(EnsembleSpec::from_json({{"kind", "wavelets"}}),
                  ConfigError);
  CHECK_THROWS_AS(EnsembleSpec::from_json({{"flavor", 3}}), ConfigError);
  CHECK_THROWS_AS(EnsembleSpec::from_json({{"count", 0}}), ConfigError);
  CHECK_THROWS_AS(make_ensemble(chirp_spec(-1, 0), line_grid(8)),
                  ConfigError);
}

TEST_CASE("identity operators give unit ratios and full reports") {
  const Ensemble ens = make_ensemble(chirp_spec(6, 5), line_grid(64));
  const ModSpaceSpec space = flat_l22();
  const RatioReport rep =
      op_norm_ratio(Symbol::constant(1.0, 1),
                    QuantizationSpec::kohn_nirenberg(1), space, space, ens);
  REQUIRE(rep.members.size() == 6);
  for (const MemberStat& m : rep.members) {
    CHECK(std::abs(m.ratio - 1.0) < 1e-10);
    CHECK(m.source_norm > 0.0);
  }
  CHECK(std::abs(rep.max_ratio - 1.0) < 1e-10);
  CHECK(rep.argmax >= 0);
  CHECK(rep.argmax_descriptor.find("gaussian-chirps") != std::string::npos);
  CHECK(rep.skipped == 0);

  const std::string csv = rep.csv();
  CHECK(csv.rfind("index,ratio,source_norm,target_norm\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  const nlohmann::json j = rep.to_json();
  CHECK(j.at("members").size() == 6);
  CHECK(j.at("grid").at("counts")[0] == 64);
}

TEST_CASE("ratios scale exactly with the symbol") {
  const Ensemble ens = make_ensemble(chirp_spec(5, 11), line_grid(64));
  const ModSpaceSpec space = flat_l22();
  const Symbol a = envelope_symbol();
  std::vector<SymbolTerm> doubled = a.terms();
  for (SymbolTerm& t : doubled) t.coef *= 2.0;
  const Symbol a2 = Symbol::closed_form(doubled, 1);

  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);
  const RatioReport r1 = op_norm_ratio(a, kn, space, space, ens);
  const RatioReport r2 = op_norm_ratio(a2, kn, space, space, ens);
  REQUIRE(r1.max_ratio > 0.0);
  CHECK(std::abs(r2.max_ratio - 2.0 * r1.max_ratio) <=
        1e-12 * r2.max_ratio);
  for (size_t i = 0; i < r1.members.size(); ++i) {
    CHECK(std::abs(r2.members[i].ratio - 2.0 * r1.members[i].ratio) <=
          1e-12 * r2.members[i].ratio);
  }
}

TEST_CASE("larger ensembles never decrease the max ratio") {
  const UniformGrid g = line_grid(48);
  const ModSpaceSpec space = flat_l22();
  const Symbol a = envelope_symbol();
  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);
  const RatioReport r4 =
      op_norm_ratio(a, kn, space, space, make_ensemble(chirp_spec(4, 7), g));
  const RatioReport r9 =
      op_norm_ratio(a, kn, space, space, make_ensemble(chirp_spec(9, 7), g));
  CHECK(r9.max_ratio >= r4.max_ratio);
}

TEST_CASE("zero-norm members are skipped with a warning count") {
  const UniformGrid g = line_grid(48);
  Ensemble ens{chirp_spec(2, 1), g, {}};
  ens.members.emplace_back(g);  // identically zero
  ens.members.push_back(sample(g, [](const Eigen::VectorXd& x) {
    return Complex(std::exp(-0.5 * x.squaredNorm()), 0.0);
  }));
  const ModSpaceSpec space = flat_l22();
  const RatioReport rep =
      op_norm_ratio(Symbol::constant(1.0, 1),
                    QuantizationSpec::kohn_nirenberg(1), space, space, ens);
  CHECK(rep.skipped == 1);
  CHECK(rep.members[0].skipped);
  CHECK(std::isnan(rep.members[0].ratio));
  CHECK_FALSE(rep.members[1].skipped);
  CHECK(rep.argmax == 1);
  CHECK(std::isfinite(rep.max_ratio));
}

TEST_CASE("ladders validate their configuration") {
  const ModSpaceSpec space = flat_l22();
  const SymbolFactory f = [](const UniformGrid&) {
    return Symbol::constant(1.0, 1);
  };
  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);
  CHECK_THROWS_AS(
      op_norm_ladder(f, kn, space, space, chirp_spec(2, 1), 8.0, {}),
      ConfigError);
  CHECK_THROWS_AS(
      op_norm_ladder(f, kn, space, space, chirp_spec(2, 1), 8.0, {64, 48}),
      ConfigError);
  CHECK_THROWS_AS(
      op_norm_ladder(f, kn, space, space, chirp_spec(2, 1), -1.0, {32, 48}),
      ConfigError);

  const RatioReport rep =
      op_norm_ladder(f, kn, space, space, chirp_spec(3, 2), 8.0, {32, 48});
  REQUIRE(rep.trend.size() == 2);
  CHECK(rep.trend[0].n == 32);
  CHECK(rep.trend[1].n == 48);
  CHECK(rep.trend_drift() < 1e-10);
}

TEST_CASE("window changes stay within measured equivalence constants") {
  const UniformGrid g = line_grid(64);
  const Ensemble ens = make_ensemble(chirp_spec(5, 23), g);
  const ModSpaceSpec narrow = flat_l22(1.0);
  const ModSpaceSpec wide = flat_l22(1.3);
  const Symbol a = envelope_symbol();
  const QuantizationSpec kn = QuantizationSpec::kohn_nirenberg(1);

  const RatioReport r1 = op_norm_ratio(a, kn, narrow, narrow, ens);
  const RatioReport r2 = op_norm_ratio(a, kn, wide, wide, ens);

  std::vector<SampledField> images;
  for (const SampledField& f : ens.members) {
    images.push_back(apply_op(a, kn, f));
  }
  const Real c_img = embedding_check(images, narrow, wide).max_ratio;
  const Real c_src = embedding_check(ens.members, wide, narrow).max_ratio;
  CHECK(r2.max_ratio <=
        c_img * c_src * r1.max_ratio * (1.0 + 1e-9));
}

TEST_CASE("kernel crosscheck matches the spectrogram pipeline") {
  const UniformGrid g = line_grid(128);
  const SampledField f =
      std::move(make_ensemble(chirp_spec(1, 2), g).members.front());
  const std::vector<std::pair<Index, Index>> probes = {
      {8, 64},  {16, 32},  {32, 96}, {40, 64}, {64, 20},  {64, 108},
      {80, 50}, {96, 64},  {100, 30}, {112, 90}, {20, 20}, {50, 70},
      {70, 40}, {90, 100}, {110, 60}, {64, 64}};
  const Weight one2 = Weight::one(2), one1 = Weight::one(1);

  SUBCASE("the trivial symbol collapses to the plain spectrogram") {
    // The frequency-side quadrature periodizes the window across the box,
    // so even the identity floors a little above machine precision.
    const KernelCheckReport rep = stft_kernel_crosscheck(
        Symbol::constant(1.0, 1), f, one2, one1, probes);
    CHECK(rep.scale > 0.0);
    CHECK(rep.max_deviation < 1e-5);
  }
  SUBCASE("the frequency symbol agrees within the quadrature budget") {
    const KernelCheckReport rep =
        stft_kernel_crosscheck(frequency_symbol(), f, one2, one1, probes);
    CHECK(rep.max_deviation < 1e-4);
  }
  SUBCASE("nontrivial weights cancel through the assembly") {
    const KernelCheckReport rep = stft_kernel_crosscheck(
        Symbol::constant(1.0, 1), f, Weight::polynomial(1.0, 2),
        Weight::polynomial(1.0, 1), probes);
    CHECK(rep.max_deviation < 1e-5);
  }
  SUBCASE("the zero signal gives zero on both paths") {
    const KernelCheckReport rep = stft_kernel_crosscheck(
        Symbol::constant(1.0, 1), SampledField(g), one2, one1, probes);
    CHECK(rep.scale == 0.0);
    CHECK(rep.max_deviation == 0.0);
  }
}

TEST_CASE("kernel crosscheck validates probes and dimensions") {
  const UniformGrid g = line_grid(32);
  const SampledField f = sample(g, [](const Eigen::VectorXd& x) {
    return Complex(std::exp(-0.5 * x.squaredNorm()), 0.0);
  });
  const Weight one2 = Weight::one(2), one1 = Weight::one(1);
  const Symbol a = Symbol::constant(1.0, 1);
  CHECK_THROWS_AS(stft_kernel_crosscheck(a, f, one2, one1, {{32, 0}}),
                  InvalidProbeError);
  CHECK_THROWS_AS(stft_kernel_crosscheck(a, f, one2, one1, {{0, -1}}),
                  InvalidProbeError);
  CHECK_THROWS_AS(stft_kernel_crosscheck(a, f, one2, one1, {}), ConfigError);
  const std::vector<std::pair<Index, Index>> many(65, {0, 0});
  CHECK_THROWS_AS(stft_kernel_crosscheck(a, f, one2, one1, many),
                  ConfigError);

  const SampledField plane =
      SampledField(UniformGrid::centered(2, 8, 4.0));
  CHECK_THROWS_AS(stft_kernel_crosscheck(Symbol::constant(1.0, 2), plane,
                                         Weight::one(4), Weight::one(2),
                                         {{0, 0}}),
                  ConfigError);
}

TEST_CASE("the trivial continuity scenario passes at unit ratio") {
  use_fixture_dir("harness_fixtures_p32");
  const nlohmann::json cfg{{"count", 4},
                           {"seed", 3},
                           {"ladder", {32, 48}},
                           {"symbol", Symbol::constant(1.0, 1).to_json()},
                           {"weight", Weight::one(2).to_json()},
                           {"weight0", Weight::one(2).to_json()}};
  const ScenarioResult res = run_scenario("p32", cfg);
  CHECK(res.status == ScenarioStatus::Pass);
  CHECK(res.exit_code() == 0);
  CHECK(std::abs(res.report.max_ratio - 1.0) < 1e-10);
  REQUIRE(res.report.trend.size() == 2);
  CHECK(fixture_state(res) == "written");

  const ScenarioResult again = run_scenario("p32", cfg);
  CHECK(again.status == ScenarioStatus::Pass);
  CHECK(fixture_state(again) == "match");
  CHECK(again.report.to_json().dump() == res.report.to_json().dump());
}

TEST_CASE("the beurling variant mirrors the trivial pass") {
  use_fixture_dir("harness_fixtures_p32b");
  const nlohmann::json cfg{{"count", 4},
                           {"seed", 3},
                           {"ladder", {32, 48}},
                           {"symbol", Symbol::constant(1.0, 1).to_json()},
                           {"weight", Weight::one(2).to_json()},
                           {"weight0", Weight::one(2).to_json()}};
  const ScenarioResult res = run_scenario("p32b", cfg);
  CHECK(res.status == ScenarioStatus::Pass);
  CHECK(std::abs(res.report.max_ratio - 1.0) < 1e-10);
}

TEST_CASE("phase-split continuity reduces to the standard split") {
  use_fixture_dir("harness_fixtures_opcont3");
  const nlohmann::json poly2 = Weight::polynomial(2.0, 2).to_json();
  const nlohmann::json poly1 = Weight::polynomial(1.0, 2).to_json();
  const nlohmann::json base{{"count", 4}, {"seed", 3}, {"ladder", {32, 48}},
                            {"weight", poly2}, {"weight0", poly1}};

  nlohmann::json standard = base;
  standard["basis"] = {{1.0, 0.0}, {0.0, 1.0}};
  standard["exponents"] = {2.0, 2.0};
  const ScenarioResult split = run_scenario("opcont3", standard);
  const ScenarioResult plain = run_scenario("p32", base);
  REQUIRE(split.status == ScenarioStatus::Pass);
  REQUIRE(plain.status == ScenarioStatus::Pass);
  CHECK(std::abs(split.report.max_ratio - plain.report.max_ratio) < 1e-10);

  nlohmann::json quasi{{"count", 4},
                       {"seed", 3},
                       {"ladder", {32, 48}},
                       {"symbol", Symbol::constant(1.0, 1).to_json()},
                       {"exponents", {0.5, 2.0}}};
  const ScenarioResult q = run_scenario("opcont3", quasi);
  CHECK(q.status == ScenarioStatus::Pass);
  CHECK(std::abs(q.report.max_ratio - 1.0) < 1e-10);

  nlohmann::json sheared = quasi;
  sheared["basis"] = {{1.0, 1.0}, {0.0, 1.0}};
  const ScenarioResult bad = run_scenario("opcont3", sheared);
  CHECK(bad.status == ScenarioStatus::Inapplicable);
  CHECK(bad.exit_code() == 4);
  CHECK(bad.report.members.empty());
}

TEST_CASE("sobolev scenario brackets the plain norm at rate zero") {
  use_fixture_dir("harness_fixtures_sobolev");
  const nlohmann::json cfg{{"count", 4},
                           {"seed", 5},
                           {"ladder", {48, 64}},
                           {"r", 0.0},
                           {"r0", 0.0}};
  const ScenarioResult res = run_scenario("sobolev", cfg);
  CHECK(res.status == ScenarioStatus::Pass);
  CHECK(std::abs(res.report.max_ratio - 1.0) < 1e-8);
  const auto& rungs = res.diagnostics.at("identity").at("rungs");
  REQUIRE(rungs.size() == 2);
  const Real lo = rungs[1].at("lo").get<Real>();
  const Real hi = rungs[1].at("hi").get<Real>();
  CHECK(lo <= hi);
  CHECK(lo < 1.0 + 1e-3);
  CHECK(hi > 1.0 - 1e-3);
  CHECK(res.diagnostics.at("identity").at("stable").get<bool>());

  nlohmann::json hot = cfg;
  hot["r"] = 9.0;  // overflows the reciprocal boundary
  CHECK_THROWS_AS(run_scenario("sobolev", hot), ConfigError);
}

TEST_CASE("weighted l2 scenario maps growth down by the symbol rate") {
  use_fixture_dir("harness_fixtures_weightedl2");
  const nlohmann::json cfg{{"count", 4},
                           {"seed", 5},
                           {"ladder", {48, 64}},
                           {"r", 0.3},
                           {"r0", 0.2}};
  const ScenarioResult res = run_scenario("weightedl2", cfg);
  CHECK(res.status == ScenarioStatus::Pass);
  CHECK(std::isfinite(res.report.max_ratio));
  CHECK(res.report.max_ratio > 0.1);
  CHECK(res.report.max_ratio < 2.0);
  CHECK(res.diagnostics.at("identity").at("stable").get<bool>());
}

TEST_CASE("incompatible weights make the compatibility scenario inapplicable") {
  use_fixture_dir("harness_fixtures_prop");
  nlohmann::json trivial{{"count", 4},
                         {"seed", 3},
                         {"ladder", {32, 48}},
                         {"symbol", Symbol::constant(1.0, 1).to_json()},
                         {"weight1", Weight::one(2).to_json()},
                         {"weight2", Weight::one(2).to_json()},
                         {"weight0", Weight::one(4).to_json()}};
  const ScenarioResult ok = run_scenario("propopcont", trivial);
  CHECK(ok.status == ScenarioStatus::Pass);
  CHECK(std::abs(ok.report.max_ratio - 1.0) < 1e-10);

  nlohmann::json bad = trivial;
  bad["weight2"] =
      Weight::tensor_split(Weight::exp_power(1.0, 1.0, 1), Weight::one(1))
          .to_json();
  const ScenarioResult rej = run_scenario("propopcont", bad);
  CHECK(rej.status == ScenarioStatus::Inapplicable);
  CHECK(rej.exit_code() == 4);
  CHECK(rej.detail.find("compatib") != std::string::npos);
}

TEST_CASE("fixtures freeze first runs and flag drift") {
  use_fixture_dir("harness_fixtures_drift");
  ScenarioResult r;
  r.scenario = "study";
  r.status = ScenarioStatus::Pass;
  r.detail = "max ratio 1.5";
  r.config = {{"knob", 1}};
  r.report.max_ratio = 1.5;
  reconcile_fixture(r);
  CHECK(fixture_state(r) == "written");

  ScenarioResult same = r;
  same.diagnostics.erase("fixture");
  reconcile_fixture(same);
  CHECK(fixture_state(same) == "match");
  CHECK(same.status == ScenarioStatus::Pass);

  ScenarioResult drifted = r;
  drifted.diagnostics.erase("fixture");
  drifted.report.max_ratio = 1.6;
  reconcile_fixture(drifted);
  CHECK(fixture_state(drifted) == "mismatch");
  CHECK(drifted.status == ScenarioStatus::Fail);
  CHECK(drifted.detail.find("mismatch") != std::string::npos);
}

TEST_CASE("scenario configs reject unknown keys and names") {
  CHECK_THROWS_AS(run_scenario("p32", {{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(run_scenario("kernel", nlohmann::json::array()),
                  ConfigError);
  CHECK_THROWS_AS(run_scenario("theorem-of-the-day", {}), ConfigError);
}

TEST_CASE("the kernel scenario wraps the crosscheck") {
  use_fixture_dir("harness_fixtures_kernel");
  const nlohmann::json cfg{{"symbol", Symbol::constant(1.0, 1).to_json()},
                           {"n", 96},
                           {"probes", 12}};
  const ScenarioResult res = run_scenario("kernel", cfg);
  CHECK(res.status == ScenarioStatus::Pass);
  CHECK(res.diagnostics.at("kernel").at("max_deviation").get<Real>() < 1e-4);
  CHECK(res.diagnostics.at("kernel").at("probes").size() == 12);
  CHECK(res.detail.find("deviation") != std::string::npos);
}
