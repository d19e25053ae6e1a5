// SPDX-License-Identifier: Apache-2.0
#include "modcalc/harness/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "modcalc/core/errors.hpp"
#include "modcalc/core/parallel.hpp"
#include "modcalc/core/rng.hpp"

namespace modcalc {

namespace {

struct ChirpParams {
  Eigen::VectorXd center, modulation;
  Real chirp = 0.0;
  Real sigma = 1.0;
};

struct AtomParams {
  Eigen::VectorXd position, frequency;
  Real amplitude = 1.0;
  Real phase = 0.0;
};

ChirpParams draw_chirp(Rng& rng, const EnsembleSpec& s, int d) {
  ChirpParams p;
  p.center.resize(d);
  p.modulation.resize(d);
  for (int a = 0; a < d; ++a) {
    p.center[a] = rng.uniform(-s.center_range, s.center_range);
  }
  for (int a = 0; a < d; ++a) {
    p.modulation[a] = rng.uniform(-s.modulation_range, s.modulation_range);
  }
  p.chirp = rng.uniform(-s.chirp_range, s.chirp_range);
  p.sigma = rng.uniform(0.5, 1.5);
  return p;
}

AtomParams draw_atom(Rng& rng, const EnsembleSpec& s, int d) {
  AtomParams p;
  p.position.resize(d);
  p.frequency.resize(d);
  for (int a = 0; a < d; ++a) {
    p.position[a] = rng.uniform(-s.center_range, s.center_range);
  }
  for (int a = 0; a < d; ++a) {
    p.frequency[a] = rng.uniform(-s.modulation_range, s.modulation_range);
  }
  p.amplitude = rng.uniform(0.2, 1.0);
  p.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return p;
}

Complex chirp_value(const ChirpParams& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = x - p.center;
  const Real mag = std::exp(-u.squaredNorm() / (2.0 * p.sigma * p.sigma));
  const Real arg = p.modulation.dot(x) + p.chirp * u.squaredNorm();
  return std::polar(mag, arg);
}

// Unit-l2 physicists' Hermite functions via the stable recurrence
//   h_0 = pi^{-1/4} e^{-x^2/2},  h_k = sqrt(2/k) x h_{k-1}
//                                      - sqrt((k-1)/k) h_{k-2}.
Real hermite_fn(int order, Real x) {
  Real prev = 0.0;
  Real cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  for (int k = 1; k <= order; ++k) {
    const Real next = std::sqrt(2.0 / k) * x * cur -
                      std::sqrt(static_cast<Real>(k - 1) / k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void validate(const EnsembleSpec& s) {
  if (s.count < 1) throw ConfigError("ensemble count must be positive");
  if (s.center_range < 0.0 || s.modulation_range < 0.0 ||
      s.chirp_range < 0.0) {
    throw ConfigError("ensemble draw ranges must be nonnegative");
  }
  if (s.max_order < 0 || s.max_order > 12) {
    throw ConfigError("hermite mix order must lie in [0, 12]");
  }
  if (s.atoms < 1 || s.atoms > 16) {
    throw ConfigError("gabor cloud atom count must lie in [1, 16]");
  }
}

}  // namespace

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::GaussianChirps:
      return "gaussian-chirps";
    case EnsembleKind::HermiteMix:
      return "hermite-mix";
    case EnsembleKind::GaborCloud:
      return "gabor-cloud";
  }
  throw ConfigError("unknown ensemble kind");
}

EnsembleKind ensemble_kind_from_string(const std::string& name) {
  if (name == "gaussian-chirps") return EnsembleKind::GaussianChirps;
  if (name == "hermite-mix") return EnsembleKind::HermiteMix;
  if (name == "gabor-cloud") return EnsembleKind::GaborCloud;
  throw ConfigError("unknown ensemble kind: " + name);
}

nlohmann::json EnsembleSpec::to_json() const {
  return {{"kind", to_string(kind)},
          {"count", count},
          {"seed", seed},
          {"center_range", center_range},
          {"modulation_range", modulation_range},
          {"chirp_range", chirp_range},
          {"max_order", max_order},
          {"atoms", atoms}};
}

EnsembleSpec EnsembleSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("ensemble spec must be an object");
  static const char* known[] = {"kind",        "count",
                                "seed",        "center_range",
                                "modulation_range", "chirp_range",
                                "max_order",   "atoms"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown ensemble key: " + item.key());
  }
  EnsembleSpec s;
  try {
    if (j.contains("kind")) {
      s.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
    }
    s.count = j.value("count", s.count);
    s.seed = j.value("seed", s.seed);
    s.center_range = j.value("center_range", s.center_range);
    s.modulation_range = j.value("modulation_range", s.modulation_range);
    s.chirp_range = j.value("chirp_range", s.chirp_range);
    s.max_order = j.value("max_order", s.max_order);
    s.atoms = j.value("atoms", s.atoms);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed ensemble spec: ") + e.what());
  }
  validate(s);
  return s;
}

Ensemble make_ensemble(const EnsembleSpec& spec, const UniformGrid& grid) {
  validate(spec);
  if (!grid.basis.is_identity()) {
    throw UnsupportedBasisError("ensembles sample axis-aligned grids");
  }
  const int d = grid.dim();
  Rng rng(spec.seed);

  // Draw every parameter before sampling so member i's draws do not
  // depend on the grid and form a prefix of any larger ensemble.
  std::vector<ChirpParams> chirps;
  std::vector<Eigen::ArrayXcd> mixes;
  std::vector<std::vector<AtomParams>> clouds;
  for (int i = 0; i < spec.count; ++i) {
    switch (spec.kind) {
      case EnsembleKind::GaussianChirps:
        chirps.push_back(draw_chirp(rng, spec, d));
        break;
      case EnsembleKind::HermiteMix: {
        Eigen::ArrayXcd c(spec.max_order + 1);
        for (int k = 0; k <= spec.max_order; ++k) {
          const Real re = rng.uniform(-1.0, 1.0);
          const Real im = rng.uniform(-1.0, 1.0);
          c[k] = Complex(re, im);
        }
        mixes.push_back(std::move(c));
        break;
      }
      case EnsembleKind::GaborCloud: {
        std::vector<AtomParams> atoms;
        atoms.reserve(spec.atoms);
        for (int k = 0; k < spec.atoms; ++k) {
          atoms.push_back(draw_atom(rng, spec, d));
        }
        clouds.push_back(std::move(atoms));
        break;
      }
    }
  }

  Ensemble ens{spec, grid, {}};
  ens.members.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    switch (spec.kind) {
      case EnsembleKind::GaussianChirps: {
        const ChirpParams& p = chirps[i];
        ens.members.push_back(
            sample(grid, [&](const Eigen::VectorXd& x) {
              return chirp_value(p, x);
            }));
        break;
      }
      case EnsembleKind::HermiteMix: {
        const Eigen::ArrayXcd& c = mixes[i];
        ens.members.push_back(sample(grid, [&](const Eigen::VectorXd& x) {
          Complex acc = 0.0;
          for (int k = 0; k < c.size(); ++k) {
            Real prod = 1.0;
            for (int a = 0; a < x.size(); ++a) prod *= hermite_fn(k, x[a]);
            acc += c[k] * prod;
          }
          return acc;
        }));
        break;
      }
      case EnsembleKind::GaborCloud: {
        const std::vector<AtomParams>& atoms = clouds[i];
        ens.members.push_back(sample(grid, [&](const Eigen::VectorXd& x) {
          Complex acc = 0.0;
          for (const AtomParams& p : atoms) {
            const Real mag =
                p.amplitude * std::exp(-0.5 * (x - p.position).squaredNorm());
            acc += std::polar(mag, p.phase + p.frequency.dot(x));
          }
          return acc;
        }));
        break;
      }
    }
  }
  return ens;
}

}  // namespace modcalc
