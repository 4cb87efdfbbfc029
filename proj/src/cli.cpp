#include "statcurv/cli.hpp"

#include "statcurv/conformal_projective.hpp"
#include "statcurv/curvature.hpp"
#include "statcurv/equivalence.hpp"
#include "statcurv/errors.hpp"
#include "statcurv/gallery.hpp"
#include "statcurv/sampling.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace statcurv {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

constexpr double kIdentityTolerance = 1e-9;
constexpr double kPairingTolerance = 1e-10;

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

template <int Rank>
Json tensor_json(const TensorArray<double, Rank>& t) {
  const int n = t.dimension();
  const auto& d = t.data();
  std::function<Json(int, std::size_t)> build = [&](int depth, std::size_t offset) -> Json {
    if (depth == Rank) return d[offset];
    Json arr = Json::array();
    for (int i = 0; i < n; ++i) arr.push_back(build(depth + 1, offset * n + i));
    return arr;
  };
  return build(0, 0);
}

Json check(double value, double tol) {
  Json j;
  j["value"] = value;
  j["tolerance"] = tol;
  j["pass"] = value <= tol;
  return j;
}

std::vector<double> parse_point(const std::string& text, int n) {
  std::vector<double> p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw SpecError("bad coordinate '" + item + "'");
    } catch (const std::logic_error&) {
      throw SpecError("bad coordinate '" + item + "'");
    }
  }
  if (static_cast<int>(p.size()) != n) {
    throw SpecError("--at needs " + std::to_string(n) + " comma-separated coordinates, got " + std::to_string(p.size()));
  }
  return p;
}

struct Common {
  std::string spec_ref;
  std::string out_path;
  bool timing = false;
};

struct Context {
  const std::vector<std::string>& args;
  std::ostream& out;
  std::ostream& err;
};

Json report_head(const Context& ctx, const ManifoldSpec* spec) {
  Json r;
  r["command"] = ctx.args;
  if (spec) {
    Json s;
    s["name"] = spec->name;
    s["fingerprint"] = spec_fingerprint(*spec);
    s["dimension"] = spec->dimension;
    r["spec"] = s;
  }
  return r;
}

void emit_report(const Context& ctx, Json report, const Common& common, int exit_code,
                 std::chrono::steady_clock::time_point start) {
  report["exit_code"] = exit_code;
  if (common.timing) {
    report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  const std::string text = report.dump(2) + "\n";
  if (common.out_path.empty()) {
    ctx.out << text;
  } else {
    std::ofstream f(common.out_path);
    if (!f) throw SpecError("cannot write report to '" + common.out_path + "'");
    f << text;
  }
}

Json validation_json(const ValidationReport& v) {
  Json j;
  j["points"] = v.points;
  j["spd"] = v.spd;
  j["torsion"] = check(v.torsion, v.tolerance);
  j["codazzi"] = check(v.codazzi, v.tolerance);
  j["dual_torsion"] = check(v.dual_torsion, v.tolerance);
  j["errors"] = v.errors;
  j["verdict"] = v.pass() ? "pass" : "fail";
  return j;
}

Json flatness_json(const FlatnessReport& f) {
  Json j;
  j["max_residual"] = f.max_residual;
  j["tolerance"] = f.tolerance;
  j["points"] = f.points;
  j["quadruples"] = f.samples;
  j["verdict"] = to_string(f.verdict);
  return j;
}

double max_W_norm(const StatisticalStructure& s, const std::vector<std::vector<double>>& sample) {
  double m = 0.0;
  for (const auto& p : sample) m = std::max(m, max_abs(W_at(s, p)));
  return m;
}

}  // namespace

ManifoldSpec resolve_spec(const std::string& ref) {
  static const std::string prefix = "gallery:";
  if (ref.rfind(prefix, 0) == 0) return lookup(ref.substr(prefix.size())).spec;
  return load_spec_file(ref);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Context ctx{args, out, err};

  CLI::App app{"statcurv: curvature and conformal-projective checks for statistical manifolds", "statcurv"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_spec) {
    if (with_spec) sub->add_option("spec", common.spec_ref, "gallery:<name> or a spec file")->required();
    sub->add_option("--out", common.out_path, "Write the report to a file instead of stdout");
    sub->add_flag("--timing", common.timing, "Include wall time in the report");
  };

  int points = kDefaultPoints;
  int trials = kDefaultTrials;
  std::uint64_t seed = 1;

  auto* validate = app.add_subcommand("validate", "Check SPD, torsion and Codazzi symmetry on sampled points");
  add_common(validate, true);
  double validate_tol = kStructureTolerance;
  validate->add_option("--tol", validate_tol, "Residual tolerance")->capture_default_str();
  validate->add_option("--points", points, "Sample points")->capture_default_str();

  auto* curvature = app.add_subcommand("curvature", "Dump all tensors at one point");
  add_common(curvature, true);
  std::string at;
  curvature->add_option("--at", at, "Point as x1,..,xn")->required();

  auto* identities = app.add_subcommand("identities", "Run the sigma, R/R*, W/W* and W-form identity checks");
  add_common(identities, true);
  identities->add_option("--seed", seed)->capture_default_str();
  identities->add_option("--points", points)->capture_default_str();
  identities->add_option("--trials", trials)->capture_default_str();
  double tol_sigma = kIdentityTolerance, tol_rr = kPairingTolerance, tol_ww = kIdentityTolerance,
         tol_forms = kIdentityTolerance;
  identities->add_option("--tol-sigma", tol_sigma)->capture_default_str();
  identities->add_option("--tol-rr", tol_rr)->capture_default_str();
  identities->add_option("--tol-ww", tol_ww)->capture_default_str();
  identities->add_option("--tol-w-forms", tol_forms)->capture_default_str();

  auto* flatness = app.add_subcommand("flatness", "Decide conformal-projective flatness");
  add_common(flatness, true);
  double flat_tol = kFlatnessTolerance;
  std::string expect;
  flatness->add_option("--tol", flat_tol)->capture_default_str();
  flatness->add_option("--expect", expect, "flat | not_flat | undetermined")
      ->check(CLI::IsMember({"flat", "not_flat", "undetermined"}));
  flatness->add_option("--seed", seed)->capture_default_str();
  flatness->add_option("--points", points)->capture_default_str();
  flatness->add_option("--trials", trials)->capture_default_str();

  auto* transform = app.add_subcommand("transform", "Apply a conformal-projective or alpha-conformal change");
  add_common(transform, true);
  std::string phi_src, psi_src, emit_path;
  double alpha = 0.0;
  auto* phi_opt = transform->add_option("--phi", phi_src, "phi expression")->required();
  auto* psi_opt = transform->add_option("--psi", psi_src, "psi expression (conformal-projective change)");
  auto* alpha_opt = transform->add_option("--alpha", alpha, "alpha (alpha-conformal change)");
  psi_opt->excludes(alpha_opt);
  transform->add_option("--emit", emit_path, "Write the transformed spec when it is serializable");
  transform->add_option("--tol", flat_tol, "Flatness tolerance")->capture_default_str();
  transform->add_option("--seed", seed)->capture_default_str();
  transform->add_option("--points", points)->capture_default_str();
  transform->add_option("--trials", trials)->capture_default_str();
  (void)phi_opt;

  auto* gallery = app.add_subcommand("gallery", "List or emit built-in structures");
  gallery->require_subcommand(1);
  auto* gallery_list = gallery->add_subcommand("list", "List gallery names");
  auto* gallery_emit = gallery->add_subcommand("emit", "Write a gallery spec file");
  std::string gallery_name, gallery_out;
  gallery_emit->add_option("name", gallery_name)->required();
  gallery_emit->add_option("--out", gallery_out, "Output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  try {
    if (gallery->parsed()) {
      if (gallery_list->parsed()) {
        Json r = report_head(ctx, nullptr);
        r["gallery"] = list_names();
        emit_report(ctx, r, common, kExitOk, start);
        return kExitOk;
      }
      const std::string text = dump_spec(lookup(gallery_name).spec);
      if (gallery_out.empty()) {
        out << text;
      } else {
        std::ofstream f(gallery_out);
        if (!f) throw SpecError("cannot write '" + gallery_out + "'");
        f << text;
      }
      return kExitOk;
    }

    const ManifoldSpec spec = resolve_spec(common.spec_ref);
    const StatisticalStructure s = build_structure(spec);
    Json r = report_head(ctx, &spec);

    if (validate->parsed()) {
      const ValidationReport v = validate_structure(s, halton_points(s.domain(), static_cast<std::size_t>(points)),
                                                    validate_tol);
      r["plan"] = {{"points", points}};
      r["validation"] = validation_json(v);
      const int code = v.pass() ? kExitOk : kExitCheckFailed;
      emit_report(ctx, r, common, code, start);
      return code;
    }

    if (curvature->parsed()) {
      const auto p = parse_point(at, s.dimension());
      const PointTensors pt = point_tensors(s, p);
      const CurvatureBundle b = curvature_bundle(s, p);
      Json v;
      v["g"] = matrix_json(pt.g);
      v["g_inv"] = matrix_json(pt.g_inv);
      v["gamma"] = tensor_json(pt.gamma);
      v["gamma_star"] = tensor_json(pt.gamma_star);
      v["cubic"] = tensor_json(pt.cubic);
      v["riemann"] = tensor_json(b.riemann);
      v["riemann_star"] = tensor_json(b.riemann_star);
      v["ricci"] = matrix_json(b.ricci);
      v["ricci_star"] = matrix_json(b.ricci_star);
      v["ricci_op"] = matrix_json(b.ricci_op);
      v["ricci_star_op"] = matrix_json(b.ricci_star_op);
      v["sigma"] = b.sigma;
      v["sigma_star"] = b.sigma_star;
      if (s.dimension() >= 3) {
        const CPTensors t = cp_tensors_from_bundle(b);
        v["L"] = matrix_json(t.L);
        v["L_star"] = matrix_json(t.L_star);
        v["L_sharp"] = matrix_json(t.L_sharp);
        v["L_star_sharp"] = matrix_json(t.L_star_sharp);
        v["W"] = tensor_json(t.W);
        v["W_star"] = tensor_json(t.W_star);
        v["W_forms_gap"] = max_abs_diff(t.W, W_direct_from_bundle(b));
      }
      r["point"] = p;
      r["values"] = v;
      emit_report(ctx, r, common, kExitOk, start);
      return kExitOk;
    }

    if (identities->parsed()) {
      const IdentityResiduals res = identity_residuals(s, points, trials, seed);
      r["seed"] = seed;
      r["plan"] = {{"points", points}, {"trials", trials}};
      Json checks;
      checks["sigma_eq"] = check(res.sigma_eq, tol_sigma);
      checks["rr_star"] = check(res.rr_star, tol_rr);
      checks["ww_star"] = res.ww_star ? check(*res.ww_star, tol_ww) : Json(nullptr);
      checks["w_forms"] = res.w_forms ? check(*res.w_forms, tol_forms) : Json(nullptr);
      bool ok = true;
      for (const auto& [name, c] : checks.items()) {
        if (!c.is_null() && !c["pass"].get<bool>()) ok = false;
      }
      r["residuals"] = checks;
      const int code = ok ? kExitOk : kExitCheckFailed;
      emit_report(ctx, r, common, code, start);
      return code;
    }

    if (flatness->parsed()) {
      const FlatnessReport f = flatness_report(s, points, trials, flat_tol, seed);
      r["seed"] = seed;
      r["plan"] = {{"points", points}, {"trials", trials}};
      r["residuals"] = {{"w_normalized", check(f.max_residual, flat_tol)}};
      Json verdicts;
      verdicts["flatness"] = to_string(f.verdict);
      int code = kExitOk;
      if (!expect.empty()) {
        verdicts["expected"] = expect;
        if (to_string(f.verdict) != expect) code = kExitCheckFailed;
      }
      r["verdicts"] = verdicts;
      r["flatness"] = flatness_json(f);
      emit_report(ctx, r, common, code, start);
      return code;
    }

    if (transform->parsed()) {
      const int n = s.dimension();
      const Expr phi = parse_expression(phi_src, n);
      Json params;
      std::optional<StatisticalStructure> t;
      if (*alpha_opt) {
        params = {{"kind", "alpha"}, {"alpha", alpha}, {"phi", phi.to_string()}};
        t = alpha_transform(s, AlphaParams{alpha, phi});
      } else {
        const Expr psi = psi_src.empty() ? Expr::constant(0.0, n) : parse_expression(psi_src, n);
        params = {{"kind", "cp"}, {"phi", phi.to_string()}, {"psi", psi.to_string()}};
        t = cp_transform(s, CpParams{phi, psi});
      }
      r["seed"] = seed;
      r["plan"] = {{"points", points}, {"trials", trials}};
      r["params"] = params;
      const auto sample = halton_points(s.domain(), static_cast<std::size_t>(points));
      const ValidationReport v = validate_structure(*t, sample);
      r["validation"] = validation_json(v);
      int code = v.pass() ? kExitOk : kExitCheckFailed;
      if (n >= 3) {
        const FlatnessReport before = flatness_report(s, points, trials, flat_tol, seed);
        const FlatnessReport after = flatness_report(*t, points, trials, flat_tol, seed);
        r["flatness"] = {{"input", flatness_json(before)}, {"output", flatness_json(after)}};
        // Measured only: invariance of W itself is not claimed.
        r["w_change"] = {{"input_max_abs_W", max_W_norm(s, sample)}, {"output_max_abs_W", max_W_norm(*t, sample)}};
      }
      if (!emit_path.empty()) {
        Json emit;
        emit["path"] = emit_path;
        if (t->spec()) {
          std::ofstream f(emit_path);
          if (!f) throw SpecError("cannot write '" + emit_path + "'");
          f << dump_spec(*t->spec());
          emit["written"] = true;
        } else {
          emit["written"] = false;
          emit["reason"] = "composed evaluator is not serializable";
          code = kExitInputError;
        }
        r["emit"] = emit;
      }
      emit_report(ctx, r, common, code, start);
      return code;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    Json r = report_head(ctx, nullptr);
    r["error"] = e.what();
    r["exit_code"] = kExitInputError;
    out << r.dump(2) << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace statcurv
