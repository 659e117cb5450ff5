#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mstrack/reference.hpp>
#include <mstrack/shapes.hpp>
#include <mstrack/stepper.hpp>

#include <cmath>
#include <numbers>

using namespace mstrack;

namespace {

constexpr double kPi = std::numbers::pi;

SchemeConfig small_config(Scheme s) {
  SchemeConfig c;
  c.scheme = s;
  c.integration = Integration::lumped;
  c.dt = 1e-2;
  c.T = 0.05;
  c.mesh = MeshParams{4.0, 64, 4, 0.05};
  return c;
}

Curve ellipse(double a, double b, Index n) {
  Matrix2X p(2, n);
  for (Index k = 0; k < n; ++k) {
    const double t = 2 * kPi * static_cast<double>(k) / static_cast<double>(n);
    p.col(k) << a * std::cos(t), b * std::sin(t);
  }
  return Curve({p});
}

}  // namespace

TEST_CASE("scheme names and configuration validation") {
  CHECK(to_string(Scheme::bgn_linear) == "bgn_linear");
  CHECK(to_string(Scheme::sp_fixed_point) == "sp_fixed_point");
  CHECK(parse_scheme("bgn-linear") == Scheme::bgn_linear);
  CHECK(parse_scheme("sp-fixed-point") == Scheme::sp_fixed_point);
  CHECK_THROWS_AS(parse_scheme("euler"), ConfigError);
  SchemeConfig c = small_config(Scheme::bgn_linear);
  CHECK_NOTHROW(c.validate());
  c.dt = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config(Scheme::bgn_linear);
  c.mesh.fine = 96;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config(Scheme::bgn_linear);
  c.T = 0.5 * c.dt;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("far field of the first annulus step") {
  const Curve c = concentric_pair(2.5, 3.0, 128);
  SchemeConfig cfg;
  cfg.scheme = Scheme::bgn_linear;
  cfg.integration = Integration::exact;
  cfg.dt = 0.064;
  cfg.T = 0.5;
  const BulkMesh m = build_adaptive(c, cfg.mesh);
  const StepResult r = linear_step(c, m, vertex_normal(c), cfg.dt, cfg);
  const double hf = cfg.mesh.fine_size();
  const BarycentricLocation corner = m.locate(Vector2(4, 4));
  const auto& tri = m.triangle(corner.triangle);
  for (Index a : tri)
    if ((m.vertex(a) - Vector2(4, 4)).norm() < 1e-12) CHECK(std::abs(r.U[a] + 1.0 / 3) <= 2 * hf + 0.02);
  const double centre = evaluate(m, r.U, Vector2(0, 0));
  CHECK(std::abs(centre - 1 / 2.5) <= 2 * hf + 0.02);
}

TEST_CASE("regular polygon is a discrete steady state") {
  const Index n = 64;
  const double radius = 1.5;
  const Curve c = circle(radius, n);
  SchemeConfig cfg = small_config(Scheme::bgn_linear);
  const BulkMesh m = build_adaptive(c, cfg.mesh);
  const StepResult r = linear_step(c, m, vertex_normal(c), cfg.dt, cfg);
  const double tol = 2 * std::pow(kPi / n, 2);
  for (Index k = 0; k < n; ++k) CHECK(r.kappa[k] == doctest::Approx(-1 / radius).epsilon(tol));
  CHECK((r.X - c.positions()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((r.U.array() - r.kappa[0]).abs().maxCoeff() <= 1e-10);

  SchemeConfig fp = small_config(Scheme::sp_fixed_point);
  const StepResult s = fixed_point_step(c, m, fp.dt, fp);
  CHECK(s.converged);
  CHECK(s.iterations <= 2);
  CHECK((s.X - c.positions()).cwiseAbs().maxCoeff() <= fp.tol);
}

TEST_CASE("linear step satisfies the discrete energy inequality") {
  const Curve c = stadium(3, 1, 64);
  for (Integration v : {Integration::lumped, Integration::exact}) {
    SchemeConfig cfg = small_config(Scheme::bgn_linear);
    cfg.integration = v;
    const BulkMesh m = build_adaptive(c, cfg.mesh);
    const StepResult r = linear_step(c, m, vertex_normal(c), cfg.dt, cfg);
    const double before = curve_length(c);
    const double after = curve_length(c.with_positions(r.X));
    const double dissipation = cfg.dt * r.U.dot(stiffness_matrix(m) * r.U);
    CHECK(dissipation > 0);
    CHECK(after + dissipation <= before * (1 + 1e-12));
    CHECK(r.diagnostics.dirichlet_energy == doctest::Approx(r.U.dot(stiffness_matrix(m) * r.U)).epsilon(1e-10));
  }
}

TEST_CASE("fixed-point step conserves the enclosed area") {
  const Curve c = ellipse(2.0, 0.8, 64);
  for (Integration v : {Integration::lumped, Integration::exact}) {
    SchemeConfig cfg = small_config(Scheme::sp_fixed_point);
    cfg.integration = v;
    cfg.tol = 1e-12;
    const BulkMesh m = build_adaptive(c, cfg.mesh);
    const StepResult r = fixed_point_step(c, m, cfg.dt, cfg);
    CHECK(r.converged);
    CHECK(r.iterations > 1);
    const double v0 = enclosed_volume(c);
    const double v1 = enclosed_volume(c.with_positions(r.X));
    CHECK(std::abs(v1 - v0) / v0 <= 1e-10);
    const double lhs = curve_length(c.with_positions(r.X)) + cfg.dt * r.U.dot(stiffness_matrix(m) * r.U);
    CHECK(lhs <= curve_length(c) * (1 + 1e-11));
  }
}

TEST_CASE("one fixed-point iteration is the linear scheme bitwise") {
  const Curve c = ellipse(2.0, 0.8, 64);
  SchemeConfig fp = small_config(Scheme::sp_fixed_point);
  fp.max_iters = 1;
  fp.accept_unconverged = true;
  const SchemeConfig lin = small_config(Scheme::bgn_linear);
  const BulkMesh m = build_adaptive(c, fp.mesh);
  const StepResult a = fixed_point_step(c, m, fp.dt, fp);
  const StepResult b = linear_step(c, m, vertex_normal(c), lin.dt, lin);
  CHECK_FALSE(a.converged);
  CHECK(a.X == b.X);
  CHECK(a.U == b.U);
  CHECK(a.kappa == b.kappa);
}

TEST_CASE("non-convergence is reported with the last residual") {
  const Curve c = ellipse(2.0, 0.8, 64);
  SchemeConfig fp = small_config(Scheme::sp_fixed_point);
  fp.max_iters = 2;
  fp.tol = 1e-300;
  const BulkMesh m = build_adaptive(c, fp.mesh);
  try {
    fixed_point_step(c, m, fp.dt, fp);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.residual > 0);
    CHECK(std::isfinite(e.residual));
  }
}

TEST_CASE("identity-metric anisotropy reproduces the isotropic scheme") {
  const Curve c = ellipse(2.0, 0.8, 64);
  SchemeConfig iso = small_config(Scheme::sp_fixed_point);
  iso.tol = 1e-13;
  SchemeConfig an = iso;
  an.anisotropy = Anisotropy::isotropic();
  const BulkMesh m = build_adaptive(c, iso.mesh);
  const StepResult a = fixed_point_step(c, m, iso.dt, iso);
  const StepResult b = fixed_point_step(c, m, an.dt, an);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.U - b.U).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(scheme_energy(c, an) == doctest::Approx(curve_length(c)).epsilon(1e-15));
}

TEST_CASE("anisotropic steps conserve area and dissipate the weighted length") {
  const Curve c = ellipse(1.6, 1.0, 64);
  for (double r : {1.0, 3.0}) {
    SchemeConfig cfg = small_config(Scheme::sp_fixed_point);
    cfg.tol = 1e-12;
    cfg.anisotropy = make_rotated_diag({{0.2, 1.0, 0.3, 1.0}, {1.0, 0.6, 1.2, 1.0}}, r);
    const BulkMesh m = build_adaptive(c, cfg.mesh);
    const StepResult s = fixed_point_step(c, m, cfg.dt, cfg);
    CHECK(s.converged);
    const Curve next = c.with_positions(s.X);
    CHECK(std::abs(enclosed_volume(next) - enclosed_volume(c)) / enclosed_volume(c) <= 1e-10);
    const double lhs = anisotropic_energy(next, *cfg.anisotropy) + cfg.dt * s.U.dot(stiffness_matrix(m) * s.U);
    CHECK(lhs <= anisotropic_energy(c, *cfg.anisotropy) * (1 + 1e-11));
  }
}

TEST_CASE("time loop: records, clipped final step and diagnostics") {
  const Curve c = ellipse(2.0, 0.8, 48);
  SchemeConfig cfg = small_config(Scheme::sp_fixed_point);
  cfg.dt = 0.1;
  cfg.T = 0.25;
  std::vector<double> times, steps;
  const SimulationSummary s = run_simulation(c, cfg, [&](const StepRecord& r) {
    times.push_back(r.t);
    steps.push_back(r.dt);
    if (r.m == 0) {
      CHECK(r.mesh == nullptr);
      CHECK(r.result == nullptr);
      CHECK(r.diagnostics.v_rel == 0.0);
    } else {
      REQUIRE(r.mesh != nullptr);
      REQUIRE(r.result != nullptr);
      CHECK(r.diagnostics.stability_residual <= 1e-11 * curve_length(c));
      CHECK(std::abs(r.diagnostics.v_rel) <= 1e-9);
      CHECK(r.diagnostics.fp_iters >= 1);
    }
  });
  REQUIRE(times.size() == 4);
  CHECK(times[3] == 0.25);
  CHECK(steps[3] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(s.steps == 3);
  CHECK(s.final_time == 0.25);
  CHECK_FALSE(s.self_intersection);

  cfg.T = 0.3;
  Index count = 0;
  const SimulationSummary t = run_simulation(c, cfg, [&](const StepRecord&) { ++count; });
  CHECK(t.steps == 3);
  CHECK(count == 4);
  CHECK(t.final_time == 0.3);
}
