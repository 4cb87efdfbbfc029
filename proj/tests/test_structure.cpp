#include "statcurv/errors.hpp"
#include "statcurv/spec_io.hpp"
#include "statcurv/structure.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace statcurv;
namespace t = statcurv::testing;

namespace {

ManifoldSpec flat_metric_spec(int n, ConnectionKind kind, std::vector<std::string> gamma = {}) {
  ManifoldSpec s;
  s.name = "test";
  s.dimension = n;
  s.domain.assign(static_cast<std::size_t>(n), Interval{-1, 1});
  s.metric.kind = MetricKind::ClosedForm;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.metric.components.push_back(i == j ? "1" : "0");
  s.connection = {kind, std::move(gamma)};
  return s;
}

/// Coefficients array with a single nonzero entry Gamma^k_ij (0-based).
std::vector<std::string> one_coefficient(int n, int k, int i, int j, const std::string& e) {
  std::vector<std::string> c(static_cast<std::size_t>(n * n * n), "0");
  c[static_cast<std::size_t>((k * n + i) * n + j)] = e;
  return c;
}

double max_abs_mat(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

const std::vector<double> kOrigin4(4, 0.0);

}  // namespace

TEST_CASE("euclidean structure has vanishing connection") {
  const auto s = build_structure(lookup("euclidean4").spec);
  const std::vector<double> p{0.3, -0.2, 0.5, 0.1};
  const PointTensors pt = point_tensors(s, p);
  CHECK(max_abs(pt.gamma) == 0);
  CHECK(max_abs(pt.gamma_star) == 0);
  CHECK(max_abs(pt.cubic) == 0);
  CHECK(max_abs_mat(pt.g - Matrix::Identity(4, 4)) == 0);
  CHECK(max_abs_mat(pt.g_inv - Matrix::Identity(4, 4)) == 0);
}

TEST_CASE("potential metric equals the hand Hessian of sum exp(x_i)") {
  const auto s = build_structure(lookup("exp_family4").spec);
  auto rng = rng_stream(3, 0);
  for (int c = 0; c < 10; ++c) {
    const auto p = t::random_point(rng, s.domain());
    const auto [g, inv] = metric_at(s, p);
    Matrix want = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) want(i, i) = std::exp(p[static_cast<std::size_t>(i)]);
    CHECK(max_abs_mat(g - want) <= 1e-14);
    CHECK(max_abs_mat(inv * g - Matrix::Identity(4, 4)) <= 1e-12);
  }
  const auto [g0, inv0] = metric_at(s, kOrigin4);
  CHECK(max_abs_mat(g0 - Matrix::Identity(4, 4)) == 0);
  CHECK(max_abs_mat(inv0 - Matrix::Identity(4, 4)) <= 1e-15);
}

TEST_CASE("torsion as written is rejected at build time") {
  auto c = one_coefficient(2, 0, 0, 1, "1");  // Gamma^1_12 = 1, Gamma^1_21 = 0
  CHECK_THROWS_AS(build_structure(flat_metric_spec(2, ConnectionKind::Coefficients, c)), SpecError);
  c[static_cast<std::size_t>((0 * 2 + 1) * 2 + 0)] = "1";
  CHECK_NOTHROW(build_structure(flat_metric_spec(2, ConnectionKind::Coefficients, c)));
}

TEST_CASE("malformed specs are rejected") {
  auto s = flat_metric_spec(3, ConnectionKind::Flat);
  s.metric.components.pop_back();
  CHECK_THROWS_AS(build_structure(s), SpecError);
  s = flat_metric_spec(3, ConnectionKind::Flat);
  s.domain[1] = {1, 1};
  CHECK_THROWS_AS(build_structure(s), SpecError);
  s = flat_metric_spec(3, ConnectionKind::Flat);
  s.metric.components[1] = "x1";
  CHECK_THROWS_AS(build_structure(s), SpecError);
  s = flat_metric_spec(3, ConnectionKind::Flat);
  s.metric.components[0] = "log(";
  CHECK_THROWS_AS(build_structure(s), Error);
  CHECK_THROWS_AS(build_structure(flat_metric_spec(1, ConnectionKind::Flat)), SpecError);
  CHECK_THROWS_AS(build_structure(flat_metric_spec(9, ConnectionKind::Flat)), SpecError);
  auto cubic = std::vector<std::string>(8, "0");
  cubic[1] = "x1";  // C_112 without C_121
  CHECK_THROWS_AS(build_structure(flat_metric_spec(2, ConnectionKind::Cubic, cubic)), SpecError);
}

TEST_CASE("evaluation outside the domain box is an error") {
  const auto s = build_structure(lookup("poincare_ball4").spec);
  CHECK_THROWS_AS(metric_at(s, std::vector<double>{0.9, 0, 0, 0}), SpecError);
  CHECK_THROWS_AS(metric_at(s, std::vector<double>{0, 0, 0}), SpecError);
}

TEST_CASE("Poincare metric at the origin") {
  const auto s = build_structure(lookup("poincare_ball4").spec);
  const auto [g, inv] = metric_at(s, kOrigin4);
  CHECK(max_abs_mat(g - 4 * Matrix::Identity(4, 4)) <= 1e-15);
  CHECK(max_abs_mat(inv - 0.25 * Matrix::Identity(4, 4)) <= 1e-15);
  CHECK(max_abs(levi_civita_at(s, kOrigin4)) == 0);
}

TEST_CASE("Levi-Civita of diag(exp(x_i)) at the origin") {
  const auto s = build_structure(lookup("exp_family4").spec);
  const Tensor3 lc = levi_civita_at(s, kOrigin4);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(lc(k, i, j) == doctest::Approx(k == i && i == j ? 0.5 : 0.0).scale(1.0));
}

TEST_CASE("Levi-Civita matches finite differences of the metric") {
  for (const char* name : {"poincare_ball4", "perturbed_euclidean4", "sphere_stereographic3"}) {
    const auto s = build_structure(lookup(name).spec);
    const int n = s.dimension();
    auto rng = rng_stream(17, 0);
    for (int c = 0; c < 5; ++c) {
      const auto p = t::random_point(rng, s.domain());
      std::vector<Matrix> dg;
      for (int m = 0; m < n; ++m) {
        const double h = t::kFdStep;
        dg.push_back((metric_at(s, t::shifted(p, m, h)).first - metric_at(s, t::shifted(p, m, -h)).first) / (2 * h));
      }
      const auto [g, inv] = metric_at(s, p);
      const Tensor3 lc = levi_civita_at(s, p);
      double worst = 0;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double want = 0;
            for (int l = 0; l < n; ++l) want += 0.5 * inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
            worst = std::max(worst, std::abs(lc(k, i, j) - want));
          }
      INFO(name);
      CHECK(worst <= 1e-7);
    }
  }
}

TEST_CASE("cubic tensor") {
  CHECK(max_abs(cubic_at(build_structure(lookup("euclidean4").spec), kOrigin4)) == 0);
  CHECK(max_abs(cubic_at(build_structure(lookup("poincare_ball4").spec), std::vector<double>{0.1, 0.2, -0.1, 0.05})) <= 1e-12);
  const Tensor3 c = cubic_at(build_structure(lookup("exp_family4").spec), kOrigin4);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(c(k, i, j) == doctest::Approx(k == i && i == j ? 1.0 : 0.0).scale(1.0));
}

TEST_CASE("dual connection") {
  CHECK(max_abs(dual_connection_at(build_structure(lookup("euclidean4").spec), kOrigin4)) == 0);
  const Tensor3 gs = dual_connection_at(build_structure(lookup("exp_family4").spec), kOrigin4);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(gs(k, i, j) == doctest::Approx(k == i && i == j ? 1.0 : 0.0).scale(1.0));
}

TEST_CASE("duality reconstruction and involution on every gallery entry") {
  for (const auto& entry : t::all_gallery_entries()) {
    const auto s = build_structure(entry.spec);
    const auto dd = dual_structure(dual_structure(s));
    const int n = s.dimension();
    for (const auto& p : halton_points(s.domain(), 20)) {
      const PointTensors pt = point_tensors(s, p);
      const FieldJets f = s.evaluate(p);
      double scale = 1, worst = 0;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double dg = f.metric(i, j).grad(k);
            double rhs = 0;
            for (int l = 0; l < n; ++l) rhs += pt.gamma(l, k, i) * pt.g(l, j) + pt.gamma_star(l, k, j) * pt.g(i, l);
            scale = std::max(scale, std::abs(dg));
            worst = std::max(worst, std::abs(dg - rhs));
          }
      INFO(entry.name);
      CHECK(worst / scale <= 1e-12);
      CHECK(max_abs_diff(point_tensors(dd, p).gamma, pt.gamma) <= 1e-12);
    }
  }
}

TEST_CASE("self-duality criterion: C = 0 iff Gamma = Gamma* iff Gamma = Levi-Civita") {
  for (const auto& entry : t::all_gallery_entries()) {
    const auto s = build_structure(entry.spec);
    for (const auto& p : halton_points(s.domain(), 5)) {
      const PointTensors pt = point_tensors(s, p);
      const bool c0 = max_abs(pt.cubic) <= 1e-10;
      const bool dual0 = max_abs_diff(pt.gamma, pt.gamma_star) <= 1e-10;
      const bool lc0 = max_abs_diff(pt.gamma, levi_civita_at(s, p)) <= 1e-10;
      INFO(entry.name);
      CHECK(c0 == dual0);
      CHECK(c0 == lc0);
    }
  }
  CHECK(max_abs(cubic_at(build_structure(lookup("poincare_ball4").spec), kOrigin4)) <= 1e-10);
  CHECK(max_abs(cubic_at(build_structure(lookup("exp_family4").spec), kOrigin4)) > 0.5);
}

TEST_CASE("validation report") {
  const auto euclid = build_structure(lookup("euclidean4").spec);
  const auto r0 = validate_structure(euclid, halton_points(euclid.domain(), 20));
  CHECK(r0.pass());
  CHECK(r0.torsion == 0);
  CHECK(r0.codazzi == 0);
  CHECK(r0.dual_torsion == 0);

  const auto ball = build_structure(lookup("poincare_ball4").spec);
  const auto r1 = validate_structure(ball, halton_points(ball.domain(), 20));
  CHECK(r1.pass());
  CHECK(r1.codazzi <= 1e-10);

  // Gamma^1_22 = x2 with g = delta: C_221 = -x2 but C_122 = 0.
  const auto broken = build_structure(flat_metric_spec(2, ConnectionKind::Coefficients, one_coefficient(2, 0, 1, 1, "x2")));
  const auto r2 = validate_structure(broken, halton_points(broken.domain(), 20));
  CHECK_FALSE(r2.pass());
  CHECK(r2.codazzi > 1e-3);
  CHECK(r2.torsion == 0);
  CHECK(r2.spd);

  // Gamma^1_11 = x2 alone only produces C_111 = -2 x2, which is symmetric.
  const auto lone = build_structure(flat_metric_spec(2, ConnectionKind::Coefficients, one_coefficient(2, 0, 0, 0, "x2")));
  const auto p = std::vector<double>{0.3, 0.6};
  const Tensor3 c = cubic_at(lone, p);
  CHECK(c(0, 0, 0) == doctest::Approx(-1.2));
  CHECK(max_abs(c) == doctest::Approx(1.2));
  CHECK(validate_structure(lone, halton_points(lone.domain(), 20)).pass());
}

TEST_CASE("non-SPD metric is reported, not thrown") {
  auto s = flat_metric_spec(2, ConnectionKind::LeviCivita);
  s.metric.components[0] = "x1";
  const auto st = build_structure(s);
  const auto r = validate_structure(st, halton_points(st.domain(), 20));
  CHECK_FALSE(r.pass());
  CHECK_FALSE(r.spd);
  CHECK(r.spd_failures > 0);
  CHECK_THROWS_AS(metric_at(st, std::vector<double>{-0.5, 0}), NonSpdMetric);
}

TEST_CASE("structures built from a symmetric cubic tensor are statistical") {
  t::RandomExpr gen(3, 41);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = flat_metric_spec(3, ConnectionKind::Cubic, std::vector<std::string>(27));
    for (int k = 0; k < 3; ++k)
      for (int i = k; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          const std::string e = "0.3*sin(" + gen(2) + ")";
          for (const auto& [a, b, d] : {std::array{k, i, j}, {k, j, i}, {i, k, j}, {i, j, k}, {j, k, i}, {j, i, k}})
            s.connection.components[static_cast<std::size_t>((a * 3 + b) * 3 + d)] = e;
        }
    s.metric.components[0] = "exp(0.2*x2)";
    s.metric.components[4] = "2 + x1*x3";
    const auto st = build_structure(s);
    CHECK(validate_structure(st, halton_points(st.domain(), 20), 1e-9).pass());
  }
}

TEST_CASE("contravariant gradient of a scalar") {
  const Expr x1 = parse_expression("x1", 4);
  const auto euclid = build_structure(lookup("euclidean4").spec);
  const Vector g0 = grad_scalar_at(euclid, x1, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(g0(0) == 1);
  CHECK(g0.tail(3).cwiseAbs().maxCoeff() == 0);
  const Vector g1 = grad_scalar_at(build_structure(lookup("poincare_ball4").spec), x1, kOrigin4);
  CHECK(g1(0) == doctest::Approx(0.25));
  CHECK(g1.tail(3).cwiseAbs().maxCoeff() == 0);
  CHECK(grad_scalar_at(euclid, parse_expression("3.5", 4), kOrigin4).cwiseAbs().maxCoeff() == 0);
  CHECK_THROWS_AS(grad_scalar_at(euclid, parse_expression("x1", 3), kOrigin4), SpecError);
}

TEST_CASE("spec files round-trip and fingerprints are content hashes") {
  for (const auto& entry : t::all_gallery_entries()) {
    const std::string text = dump_spec(entry.spec);
    const ManifoldSpec back = parse_spec(text);
    CHECK(dump_spec(back) == text);
    CHECK(spec_fingerprint(back) == spec_fingerprint(entry.spec));
  }
  auto s = lookup("euclidean4").spec;
  const auto fp = spec_fingerprint(s);
  CHECK(fp.size() == 16);
  s.domain[0].hi = 0.5;
  CHECK(spec_fingerprint(s) != fp);
}

TEST_CASE("spec parsing reports schema problems") {
  CHECK_THROWS_AS(parse_spec("{"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"dimension": 2})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"dimension": 2, "domain": [[-1,1],[-1,1]],
    "metric": {"kind": "round"}, "connection": {"kind": "flat"}})"),
                  SpecError);
  CHECK_THROWS_AS(load_spec_file("/nonexistent/spec.json"), SpecError);
  const auto ok = parse_spec(R"({"dimension": 2, "domain": [[-1,1],[-1,1]],
    "metric": {"kind": "conformal", "factor": "1 + normsq"}, "connection": {"kind": "levi_civita"}})");
  CHECK(ok.metric.kind == MetricKind::Conformal);
  CHECK(validate_structure(build_structure(ok), halton_points(ok.domain, 20)).pass());
}
