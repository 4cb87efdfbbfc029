#include "statcurv/gallery.hpp"

#include "statcurv/errors.hpp"
#include "statcurv/sampling.hpp"

#include <cctype>
#include <cmath>

namespace statcurv {
namespace {

constexpr Family kFamilies[] = {Family::Euclidean, Family::PoincareBall, Family::SphereStereographic,
                                Family::ExpFamily, Family::HessianPotential};

std::vector<Interval> box(int n, double half_width) { return std::vector<Interval>(n, Interval{-half_width, half_width}); }

std::vector<std::string> identity_components(int n) {
  std::vector<std::string> c(static_cast<std::size_t>(n) * n, "0");
  for (int i = 0; i < n; ++i) c[i * n + i] = "1";
  return c;
}

std::string coord(int i) { return "x" + std::to_string(i + 1); }

ExpectedValues expected_for(int n, double K) {
  return {K, n * (n - 1.0) * K, n >= 4 ? FlatnessVerdict::Flat : FlatnessVerdict::Undetermined};
}

/// Canonical text of a random affine polynomial a0 + sum a_m x_m.
std::string random_affine(std::mt19937_64& rng, int n, double scale) {
  std::string s = format_number(scale * (2.0 * uniform01(rng) - 1.0));
  for (int m = 0; m < n; ++m) s += " + " + format_number(scale * (2.0 * uniform01(rng) - 1.0)) + "*" + coord(m);
  return parse_expression(s, n).to_string();
}

bool all_constant(const std::vector<std::string>& comps, int n) {
  for (const auto& c : comps) {
    if (!parse_expression(c, n).is_constant()) return false;
  }
  return true;
}

bool is_zero_literal(const std::string& c, int n) {
  const Expr e = parse_expression(c, n);
  return e.is_constant() && eval_value(e, std::vector<double>(static_cast<std::size_t>(n), 0.0)) == 0.0;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::Euclidean: return "euclidean";
    case Family::PoincareBall: return "poincare_ball";
    case Family::SphereStereographic: return "sphere_stereographic";
    case Family::ExpFamily: return "exp_family";
    case Family::HessianPotential: return "hessian_potential";
  }
  return "?";
}

std::optional<Family> parse_family(const std::string& s) {
  for (Family f : kFamilies) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

std::string default_potential(int n) {
  std::string sum;
  for (int i = 0; i < n; ++i) sum += (i ? " + exp(" : "exp(") + coord(i) + ")";
  return "log(" + sum + ") + 0.5*normsq";
}

GalleryEntry construct(Family family, int n, const std::string& potential) {
  if (n < 2 || n > kMaxDimension) throw SpecError("gallery dimension must be in 2.." + std::to_string(kMaxDimension));
  GalleryEntry e;
  e.name = std::string(to_string(family)) + std::to_string(n);
  ManifoldSpec& s = e.spec;
  s.name = e.name;
  s.dimension = n;
  s.provenance["family"] = to_string(family);

  switch (family) {
    case Family::Euclidean:
      s.domain = box(n, 1.0);
      s.metric = {MetricKind::ClosedForm, identity_components(n)};
      s.connection = {ConnectionKind::Flat, {}};
      e.expected = expected_for(n, 0.0);
      break;
    case Family::PoincareBall:
      // Corners of the box stay at |x| = 0.9 < 1.
      s.domain = box(n, 0.9 / std::sqrt(static_cast<double>(n)));
      s.metric = {MetricKind::Conformal, {"4/pow(1 - normsq, 2)"}};
      s.connection = {ConnectionKind::LeviCivita, {}};
      e.expected = expected_for(n, -1.0);
      break;
    case Family::SphereStereographic:
      s.domain = box(n, 1.0);
      s.metric = {MetricKind::Conformal, {"4/pow(1 + normsq, 2)"}};
      s.connection = {ConnectionKind::LeviCivita, {}};
      e.expected = expected_for(n, 1.0);
      break;
    case Family::ExpFamily: {
      std::string psi;
      for (int i = 0; i < n; ++i) psi += (i ? " + exp(" : "exp(") + coord(i) + ")";
      s.domain = box(n, 1.0);
      s.metric = {MetricKind::Potential, {psi}};
      s.connection = {ConnectionKind::Flat, {}};
      e.expected = expected_for(n, 0.0);
      break;
    }
    case Family::HessianPotential:
      s.domain = box(n, 1.0);
      s.metric = {MetricKind::Potential, {potential.empty() ? default_potential(n) : potential}};
      s.connection = {ConnectionKind::Flat, {}};
      if (!potential.empty()) {
        e.name += "_custom";
        s.name = e.name;
      }
      e.expected = expected_for(n, 0.0);
      break;
  }
  // Surfaces parse errors in a user-supplied potential immediately.
  build_structure(s);
  return e;
}

GalleryEntry perturb(const GalleryEntry& entry, const PerturbOptions& options) {
  if (!(options.amplitude >= 0.0) || !std::isfinite(options.amplitude)) throw SpecError("amplitude must be >= 0");
  if (options.amplitude == 0.0) return entry;

  const ManifoldSpec& base = entry.spec;
  const int n = base.dimension;
  ManifoldSpec s = base;
  auto rng = rng_stream(options.seed, 0);

  std::vector<std::string> base_cubic;
  switch (base.connection.kind) {
    case ConnectionKind::LeviCivita: break;
    case ConnectionKind::Cubic: base_cubic = base.connection.components; break;
    case ConnectionKind::Flat:
      if (base.metric.kind == MetricKind::ClosedForm && all_constant(base.metric.components, n)) break;
      throw SpecError("cannot perturb '" + entry.name +
                      "': a flat connection on a non-constant metric has no closed-form cubic tensor");
    case ConnectionKind::Coefficients:
      throw SpecError("cannot perturb '" + entry.name + "': coefficient connections have no closed-form cubic tensor");
  }

  // Random totally symmetric C: one affine polynomial per sorted index triple.
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  std::vector<std::string> cubic(n3);
  for (int k = 0; k < n; ++k) {
    for (int i = k; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        std::string c = random_affine(rng, n, options.amplitude);
        const int idx[3] = {k, i, j};
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& p : perms) {
          const std::size_t a = static_cast<std::size_t>((idx[p[0]] * n + idx[p[1]]) * n + idx[p[2]]);
          cubic[a] = base_cubic.empty() ? c : parse_expression("(" + base_cubic[a] + ") + (" + c + ")", n).to_string();
        }
      }
    }
  }
  s.connection = {ConnectionKind::Cubic, std::move(cubic)};

  if (options.metric_bump) {
    const std::string q = random_affine(rng, n, options.amplitude) + " + " +
                          format_number(options.amplitude * (2.0 * uniform01(rng) - 1.0)) + "*normsq";
    const std::string bump = "exp(" + parse_expression(q, n).to_string() + ")";
    switch (base.metric.kind) {
      case MetricKind::ClosedForm:
        for (auto& c : s.metric.components) {
          if (!is_zero_literal(c, n)) c = parse_expression("(" + c + ")*" + bump, n).to_string();
        }
        break;
      case MetricKind::Conformal:
        s.metric.components[0] = parse_expression("(" + s.metric.components[0] + ")*" + bump, n).to_string();
        break;
      case MetricKind::Potential:
        throw SpecError("cannot bump the metric of '" + entry.name + "': potential metrics stay Hessian");
    }
  }

  GalleryEntry out;
  out.name = entry.name + "_perturbed";
  s.name = out.name;
  s.provenance["base"] = entry.name;
  s.provenance["amplitude"] = format_number(options.amplitude);
  s.provenance["seed"] = std::to_string(options.seed);
  s.provenance["metric_bump"] = options.metric_bump ? "true" : "false";
  out.spec = std::move(s);

  const StatisticalStructure st = build_structure(out.spec);
  const ValidationReport report = validate_structure(st, halton_points(st.domain(), kDefaultPoints));
  if (!report.pass()) {
    throw SpecError("perturbation of '" + entry.name + "' is not a valid statistical structure on its domain" +
                    (report.errors.empty() ? std::string() : ": " + report.errors.front()));
  }
  return out;
}

const std::vector<FrozenPerturbation>& frozen_perturbations() {
  static const std::vector<FrozenPerturbation> list = {
      {"perturbed_euclidean4", "euclidean4", {0.2, 7, true}},
      {"perturbed_euclidean4_cubic", "euclidean4", {0.2, 3, false}},
      {"perturbed_poincare_ball4", "poincare_ball4", {0.1, 7, false}},
      {"perturbed_poincare_ball4_bump", "poincare_ball4", {0.1, 13, true}},
      {"perturbed_sphere_stereographic4", "sphere_stereographic4", {0.1, 11, true}},
      {"perturbed_euclidean3", "euclidean3", {0.2, 5, true}},
  };
  return list;
}

std::vector<std::string> list_names() {
  std::vector<std::string> names;
  for (int n : {3, 4}) {
    for (Family f : kFamilies) names.push_back(std::string(to_string(f)) + std::to_string(n));
  }
  for (const auto& p : frozen_perturbations()) names.push_back(p.name);
  return names;
}

GalleryEntry lookup(const std::string& name) {
  for (const auto& p : frozen_perturbations()) {
    if (p.name == name) {
      GalleryEntry e = perturb(lookup(p.base), p.options);
      e.name = p.name;
      e.spec.name = p.name;
      return e;
    }
  }
  std::size_t digits = name.size();
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(name[digits - 1]))) --digits;
  const auto family = parse_family(name.substr(0, digits));
  if (!family || digits == name.size() || name.size() - digits > 2) {
    throw SpecError("unknown gallery entry '" + name + "'");
  }
  return construct(*family, std::stoi(name.substr(digits)));
}

}  // namespace statcurv
