#include <mstrack/reference.hpp>

#include <cmath>
#include <cstdio>

namespace mstrack {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

AnnulusSolution::AnnulusSolution(double r1_0, double r2_0, int dim) : r1_0_(r1_0), r2_0_(r2_0), dim_(dim) {
  if (dim != 2 && dim != 3) throw ConfigError("annulus solution needs dim 2 or 3");
  if (!(r1_0 > 0 && r1_0 < r2_0)) throw ConfigError("annulus solution needs 0 < r1 < r2");
  v0_ = std::pow(r2_0, dim) - std::pow(r1_0, dim);
  T0_ = elapsed(0.0);
}

double AnnulusSolution::r2_from_r1(double r1) const {
  return dim_ == 2 ? std::sqrt(v0_ + r1 * r1) : std::cbrt(v0_ + r1 * r1 * r1);
}

double AnnulusSolution::integrand(double r) const {
  if (r <= 0) return 0;
  const double r2 = r2_from_r1(r);
  if (dim_ == 2) return r * std::log(r2 / r) / (1 / r + 1 / r2);
  return r * r / 2 * (r2 - r) / (r + r2);
}

double AnnulusSolution::elapsed(double r) const {
  return adaptive_simpson([this](double s) { return integrand(s); }, r, r1_0_, 1e-12);
}

double AnnulusSolution::r1_at(double t) const {
  if (t < 0) throw DomainError("annulus solution: negative time");
  if (t == 0) return r1_0_;
  if (!(t < T0_)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "t = %.17g is not before the extinction time T_0 = %.17g", t, T0_);
    throw DomainError(buf);
  }
  // elapsed() decreases in r: elapsed(lo) > t > elapsed(hi).
  double lo = 0, hi = r1_0_;
  double glo = T0_ - t, ghi = -t;
  while (hi - lo > 1e-6 * r1_0_) {
    const double mid = 0.5 * (lo + hi);
    const double g = elapsed(mid) - t;
    if (g > 0) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
      ghi = g;
    }
  }
  // Safeguarded secant inside the bracket.
  double a = lo, ga = glo, b = hi, gb = ghi;
  for (int it = 0; it < 100; ++it) {
    double s = b - gb * (b - a) / (gb - ga);
    if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
    const double gs = elapsed(s) - t;
    if (gs > 0) lo = s;
    else hi = s;
    a = b;
    ga = gb;
    b = s;
    gb = gs;
    if (std::abs(b - a) <= 1e-15 * r1_0_ || gs == 0 || hi - lo <= 1e-15 * r1_0_) break;
  }
  return b;
}

AnnulusState AnnulusSolution::state(double t) const {
  const double r1 = r1_at(t);
  return {r1, r2_from_r1(r1), t, dim_};
}

double r1_at(double t, double r1_0, double r2_0) { return AnnulusSolution(r1_0, r2_0, 2).r1_at(t); }

double exact_u(double radius, const AnnulusState& s) {
  const double d1 = s.dim - 1;
  if (radius >= s.r2) return -d1 / s.r2;
  if (radius <= s.r1) return d1 / s.r1;
  if (s.dim == 2) return 1 / s.r1 - std::log(radius / s.r1) * (1 / s.r1 + 1 / s.r2) / std::log(s.r2 / s.r1);
  return -4 / (s.r2 - s.r1) + 2 / radius * (s.r1 + s.r2) / (s.r2 - s.r1);
}

double exact_u(const Vector2& z, const AnnulusState& s) { return exact_u(z.norm(), s); }

double curve_error(const Curve& curve, const AnnulusState& s) {
  double err = 0;
  for (Index k = 0; k < curve.num_vertices(); ++k) {
    const double r = curve.vertex(k).norm();
    err = std::max(err, std::min(std::abs(r - s.r1), std::abs(r - s.r2)));
  }
  return err;
}

double bulk_error(const BulkMesh& mesh, const VectorX& U, const AnnulusState& s) {
  double err = 0;
  for (Index a = 0; a < mesh.num_vertices(); ++a) err = std::max(err, std::abs(U[a] - exact_u(Vector2(mesh.vertex(a)), s)));
  return err;
}

}  // namespace mstrack
