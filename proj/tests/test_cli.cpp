#include "statcurv/cli.hpp"
#include "statcurv/gallery.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using statcurv::Json;
using statcurv::run_cli;

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "statcurv_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct GoldenCase {
  const char* name;
  std::vector<std::string> args;
  int code;
};

// Golden reports are regenerated with STATCURV_UPDATE_GOLDEN=1.
const std::vector<GoldenCase> kGolden = {
    {"validate_poincare_ball4", {"validate", "gallery:poincare_ball4"}, 0},
    {"flatness_euclidean4", {"flatness", "gallery:euclidean4", "--expect", "flat"}, 0},
    {"flatness_perturbed_euclidean4", {"flatness", "gallery:perturbed_euclidean4", "--expect", "flat"}, 1},
    {"flatness_euclidean3", {"flatness", "gallery:euclidean3"}, 0},
    {"identities_exp_family4", {"identities", "gallery:exp_family4", "--seed", "3", "--points", "6", "--trials", "10"}, 0},
    {"identities_perturbed_euclidean4", {"identities", "gallery:perturbed_euclidean4", "--points", "6", "--trials", "10"}, 0},
    {"identities_poincare_ball3", {"identities", "gallery:poincare_ball3", "--points", "4", "--trials", "5"}, 0},
    {"curvature_poincare_ball4", {"curvature", "gallery:poincare_ball4", "--at", "0,0,0,0"}, 0},
    {"gallery_list", {"gallery", "list"}, 0},
};

}  // namespace

TEST_CASE("golden reports") {
  const bool update = std::getenv("STATCURV_UPDATE_GOLDEN") != nullptr;
  const fs::path dir = STATCURV_GOLDEN_DIR;
  for (const auto& g : kGolden) {
    const Run r = run(g.args);
    const fs::path file = dir / (std::string(g.name) + ".json");
    INFO(g.name);
    CHECK(r.code == g.code);
    if (update) write(file, r.out);
    CHECK(r.out == read(file));
  }
}

TEST_CASE("reports carry every residual with its tolerance") {
  const Run r = run({"identities", "gallery:perturbed_euclidean4", "--points", "5", "--trials", "5"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  for (const char* key : {"sigma_eq", "rr_star", "ww_star", "w_forms"}) {
    INFO(key);
    REQUIRE(j["residuals"].contains(key));
    CHECK(j["residuals"][key].contains("tolerance"));
    CHECK(j["residuals"][key]["value"].get<double>() <= j["residuals"][key]["tolerance"].get<double>());
  }
  CHECK(j["spec"]["fingerprint"].get<std::string>().size() == 16);
  CHECK(j["seed"] == 1);
  CHECK_FALSE(j.contains("wall_time_s"));
}

TEST_CASE("identical runs produce byte-identical reports") {
  const std::vector<std::string> args{"identities", "gallery:perturbed_sphere_stereographic4", "--seed", "11"};
  const Run a = run(args);
  ::setenv("STATCURV_THREADS", "3", 1);
  const Run b = run(args);
  ::unsetenv("STATCURV_THREADS");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(run({"identities", "gallery:perturbed_sphere_stereographic4", "--seed", "12"}).out != a.out);
}

TEST_CASE("timing is opt-in") {
  const Run r = run({"validate", "gallery:euclidean3", "--timing"});
  CHECK(Json::parse(r.out).contains("wall_time_s"));
}

TEST_CASE("tolerance flags override defaults") {
  const Run r = run({"flatness", "gallery:perturbed_euclidean4", "--tol", "10", "--expect", "flat"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["residuals"]["w_normalized"]["tolerance"] == 10.0);
  const Run strict = run({"identities", "gallery:poincare_ball4", "--tol-w-forms", "0", "--points", "3"});
  CHECK(strict.code == 1);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  const Run r = run({"validate", "gallery:euclidean4", "--bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({"flatness", "gallery:euclidean4", "--expect", "maybe"}).code == 2);
  CHECK(run({"transform", "gallery:euclidean4", "--phi", "x1", "--psi", "x2", "--alpha", "1"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("input errors exit 2") {
  const fs::path broken = scratch("broken_spec.json");
  write(broken, R"({"dimension": 2, "domain": [[-1, 1], [-1, 1]],
  "metric": {"kind": "closed_form", "components": [["1", "0"], ["0", "1"]]},
  "connection": {"kind": "coefficients", "components": [[["0", "1"], ["0", "0"]], [["0", "0"], ["0", "0"]]]}})");
  const Run r = run({"validate", broken.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("torsion") != std::string::npos);
  CHECK(run({"validate", "gallery:no_such_entry"}).code == 2);
  CHECK(run({"validate", scratch("missing.json").string()}).code == 2);
  CHECK(run({"curvature", "gallery:euclidean4", "--at", "0,0"}).code == 2);
  CHECK(run({"curvature", "gallery:euclidean4", "--at", "0,0,0,zero"}).code == 2);
  CHECK(run({"curvature", "gallery:poincare_ball4", "--at", "0.9,0,0,0"}).code == 2);
  CHECK(run({"flatness", "gallery:euclidean2"}).code == 2);
  CHECK(run({"transform", "gallery:euclidean4", "--phi", "x7"}).code == 2);
}

TEST_CASE("a failed structural check exits 1") {
  const fs::path spec = scratch("non_codazzi.json");
  write(spec, R"({"dimension": 2, "domain": [[-1, 1], [-1, 1]],
  "metric": {"kind": "closed_form", "components": [["1", "0"], ["0", "1"]]},
  "connection": {"kind": "coefficients", "components": [[["0", "0"], ["0", "x2"]], [["0", "0"], ["0", "0"]]]}})");
  const Run r = run({"validate", spec.string()});
  CHECK(r.code == 1);
  CHECK(Json::parse(r.out)["validation"]["verdict"] == "fail");
}

TEST_CASE("transform reports and emission") {
  const fs::path out = scratch("rescaled.json");
  fs::remove(out);
  const Run ok = run({"transform", "gallery:poincare_ball4", "--phi", "0.5", "--psi", "0.25", "--emit", out.string()});
  CHECK(ok.code == 0);
  const Json j = Json::parse(ok.out);
  CHECK(j["emit"]["written"] == true);
  CHECK(j["flatness"]["output"]["verdict"] == "flat");
  CHECK(j.contains("w_change"));
  CHECK(run({"validate", out.string()}).code == 0);

  const fs::path skipped = scratch("composed.json");
  fs::remove(skipped);
  const Run composed = run({"transform", "gallery:euclidean4", "--phi", "x1", "--psi", "x2", "--emit", skipped.string()});
  CHECK(composed.code == 2);
  CHECK(Json::parse(composed.out)["emit"]["written"] == false);
  CHECK_FALSE(fs::exists(skipped));

  const Run alpha = run({"transform", "gallery:exp_family4", "--alpha", "-1", "--phi", "0.3*x1"});
  CHECK(alpha.code == 0);
  CHECK(Json::parse(alpha.out)["params"]["kind"] == "alpha");
}

TEST_CASE("gallery emit writes canonical spec files") {
  const Run r = run({"gallery", "emit", "exp_family4"});
  CHECK(r.code == 0);
  const fs::path file = scratch("exp_family4.json");
  CHECK(run({"gallery", "emit", "exp_family4", "--out", file.string()}).code == 0);
  CHECK(read(file) == r.out);
  CHECK(run({"identities", file.string(), "--points", "3"}).code == 0);
  CHECK(run({"gallery", "emit", "nothing"}).code == 2);
}

TEST_CASE("--out redirects the report") {
  const fs::path file = scratch("report.json");
  const Run r = run({"validate", "gallery:euclidean4", "--out", file.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(Json::parse(read(file))["validation"]["verdict"] == "pass");
}
