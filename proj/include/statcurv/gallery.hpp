#pragma once

// Built-in example structures.
//
//   euclidean(n)             g = delta, flat                       K = 0
//   poincare_ball(n)         g = 4 delta/(1-|x|^2)^2, Levi-Civita  K = -1
//   sphere_stereographic(n)  g = 4 delta/(1+|x|^2)^2, Levi-Civita  K = +1
//   exp_family(n)            g = Hess sum exp(x_i), flat           dually flat
//   hessian_potential(n, psi) g = Hess psi, flat                   dually flat
//
// Perturbations add a seeded, totally symmetric cubic field C through
// Gamma = Gamma_LC - 1/2 g^{-1} C (and optionally a conformal bump e^q on g),
// so they stay statistical manifolds by construction.

#include "statcurv/conformal_projective.hpp"
#include "statcurv/structure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace statcurv {

enum class Family { Euclidean, PoincareBall, SphereStereographic, ExpFamily, HessianPotential };

const char* to_string(Family f);
std::optional<Family> parse_family(const std::string& s);

struct ExpectedValues {
  double K = 0.0;
  double sigma = 0.0;
  FlatnessVerdict verdict = FlatnessVerdict::Flat;
};

struct GalleryEntry {
  std::string name;
  ManifoldSpec spec;
  std::optional<ExpectedValues> expected;
};

/// Default potential for hessian_potential: log-sum-exp plus a quadratic.
std::string default_potential(int n);

GalleryEntry construct(Family family, int n, const std::string& potential = {});

struct PerturbOptions {
  double amplitude = 0.1;
  std::uint64_t seed = 1;
  bool metric_bump = false;
};

/// Adds a random Codazzi-preserving cubic field (and optional metric bump).
/// amplitude == 0 returns the entry unchanged. Throws SpecError for bases that
/// cannot absorb a cubic field in closed form (flat connection on a
/// non-constant metric) or when the result fails validation.
GalleryEntry perturb(const GalleryEntry& entry, const PerturbOptions& options);

/// A named perturbation frozen for the test suites.
struct FrozenPerturbation {
  std::string name;
  std::string base;
  PerturbOptions options;
};

const std::vector<FrozenPerturbation>& frozen_perturbations();

/// Names accepted by lookup(): "<family><n>" for n in 2..8, plus the frozen
/// perturbations. list_names() reports the n = 3 and n = 4 entries.
std::vector<std::string> list_names();
GalleryEntry lookup(const std::string& name);

}  // namespace statcurv
