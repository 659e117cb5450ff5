#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mstrack/reference.hpp>
#include <mstrack/shapes.hpp>

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <numbers>

using namespace mstrack;

namespace {

// Radial velocity of the inner interface obtained from the harmonic potential
// in the ring with u = (d-1)/r1 inside and -(d-1)/r2 outside.
double inner_speed(double r1, double r2, int dim) {
  if (dim == 2) return -(1 / r1 + 1 / r2) / (r1 * std::log(r2 / r1));
  const double b = 2 * (1 / r1 + 1 / r2) / (1 / r1 - 1 / r2);
  return -b / (r1 * r1);
}

double ode_r1(double r1_0, double r2_0, int dim, double t) {
  namespace odeint = boost::numeric::odeint;
  const double v0 = std::pow(r2_0, dim) - std::pow(r1_0, dim);
  auto rhs = [&](const double& r1, double& drdt, double) {
    const double r2 = std::pow(v0 + std::pow(r1, dim), 1.0 / dim);
    drdt = inner_speed(r1, r2, dim);
  };
  double r = r1_0;
  auto stepper = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<double>());
  odeint::integrate_adaptive(stepper, rhs, r, 0.0, t, 1e-6);
  return r;
}

}  // namespace

TEST_CASE("adaptive Simpson on smooth integrands") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0, 1) ==
        doctest::Approx(std::exp(1.0) - 1).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return 1 / x; }, 1, 10) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("concentric circles: initial and reported radii") {
  const AnnulusSolution s(2.5, 3.0, 2);
  CHECK(s.r1_at(0) == 2.5);
  CHECK(s.r2_at(0) == doctest::Approx(3.0).epsilon(1e-15));
  // Radii reported at t = 0.5 to two decimals.
  CHECK(std::abs(s.r1_at(0.5) - 1.66) <= 0.005);
  CHECK(std::abs(s.r2_at(0.5) - 2.35) <= 0.005);
  CHECK(r1_at(0.5, 2.5, 3.0) == s.r1_at(0.5));
}

TEST_CASE("radii agree with an explicit Runge-Kutta integration") {
  for (int dim : {2, 3}) {
    const AnnulusSolution s(2.5, 3.0, dim);
    const double T0 = s.extinction_time();
    for (double frac : {0.05, 0.2, 0.4, 0.6, 0.8, 0.9}) {
      const double t = frac * T0;
      CHECK(s.r1_at(t) == doctest::Approx(ode_r1(2.5, 3.0, dim, t)).epsilon(1e-8));
    }
  }
  const AnnulusSolution other(0.7, 1.9, 2);
  CHECK(other.r1_at(0.3 * other.extinction_time()) ==
        doctest::Approx(ode_r1(0.7, 1.9, 2, 0.3 * other.extinction_time())).epsilon(1e-8));
}

TEST_CASE("invariant volume, monotone radii and continuity in time") {
  for (int dim : {2, 3}) {
    const AnnulusSolution s(2.5, 3.0, dim);
    const double T0 = s.extinction_time();
    CHECK(T0 == doctest::Approx(s.elapsed(0.0)).epsilon(1e-15));
    double prev1 = INFINITY, prev2 = INFINITY;
    for (int i = 0; i < 100; ++i) {
      const double t = T0 * i / 100.0;
      const AnnulusState st = s.state(t);
      CHECK(st.dim == dim);
      CHECK(std::pow(st.r2, dim) - std::pow(st.r1, dim) == doctest::Approx(s.v0()).epsilon(1e-12));
      CHECK(st.r1 < prev1);
      CHECK(st.r2 < prev2);
      prev1 = st.r1;
      prev2 = st.r2;
      const double dt = 1e-9 * T0;
      if (i > 0) CHECK(std::abs(s.r1_at(t + dt) - s.r1_at(t)) <= 1e-6);
    }
    CHECK(s.elapsed(s.r1_at(0.37 * T0)) == doctest::Approx(0.37 * T0).epsilon(1e-10));
  }
}

TEST_CASE("exact potential: interface values and continuity") {
  for (int dim : {2, 3}) {
    const AnnulusSolution s(2.5, 3.0, dim);
    const AnnulusState st = s.state(0.2);
    const double d1 = dim - 1;
    CHECK(exact_u(0.0, st) == doctest::Approx(d1 / st.r1).epsilon(1e-15));
    CHECK(exact_u(0.5 * st.r1, st) == doctest::Approx(d1 / st.r1).epsilon(1e-15));
    CHECK(exact_u(10.0, st) == doctest::Approx(-d1 / st.r2).epsilon(1e-15));
    for (double r : {st.r1, st.r2}) {
      CHECK(std::abs(exact_u(r * (1 + 1e-14), st) - exact_u(r * (1 - 1e-14), st)) <= 1e-12);
    }
    CHECK(exact_u(st.r1, st) == doctest::Approx(d1 / st.r1).epsilon(1e-14));
    CHECK(exact_u(st.r2, st) == doctest::Approx(-d1 / st.r2).epsilon(1e-14));
    // Monotone in between.
    double prev = exact_u(st.r1, st);
    for (int i = 1; i <= 20; ++i) {
      const double r = st.r1 + (st.r2 - st.r1) * i / 20.0;
      const double v = exact_u(r, st);
      CHECK(v < prev);
      prev = v;
    }
  }
  const AnnulusState st = AnnulusSolution(2.5, 3.0).state(0.1);
  CHECK(exact_u(Vector2(1.0, 2.0), st) == exact_u(std::sqrt(5.0), st));
}

TEST_CASE("invalid times and parameters") {
  const AnnulusSolution s(2.5, 3.0, 2);
  CHECK_THROWS_AS(s.r1_at(s.extinction_time()), DomainError);
  CHECK_THROWS_AS(s.r1_at(s.extinction_time() + 1), DomainError);
  CHECK_THROWS_AS(s.r1_at(-0.1), DomainError);
  CHECK_THROWS_AS(AnnulusSolution(3.0, 2.5, 2), ConfigError);
  CHECK_THROWS_AS(AnnulusSolution(1.0, 2.0, 4), ConfigError);
}

TEST_CASE("discrete errors vanish on the exact configuration") {
  const AnnulusSolution s(2.5, 3.0, 2);
  const AnnulusState st = s.state(0.25);
  const Curve c = concentric_pair(st.r1, st.r2, 100);
  CHECK(curve_error(c, st) <= 1e-14);
  const BulkMesh m = build_adaptive(c, MeshParams{});
  const VectorX u = interpolate(m, [&](const Vector2& z) { return exact_u(z, st); });
  CHECK(bulk_error(m, u, st) == 0.0);
  const Curve off = concentric_pair(st.r1 + 0.01, st.r2, 100);
  CHECK(curve_error(off, st) == doctest::Approx(0.01).epsilon(1e-10));
}
