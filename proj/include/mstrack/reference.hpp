#pragma once

#include <mstrack/bulk_mesh.hpp>

#include <functional>

namespace mstrack {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int max_depth = 50);

/// Radii of the concentric-circle (d = 2) or concentric-sphere (d = 3)
/// solution at time t.
struct AnnulusState {
  double r1 = 0;
  double r2 = 0;
  double t = 0;
  int dim = 2;
};

/// Two concentric interfaces r1 < r2 bounding the inner phase. The inner
/// radius follows from t = int_{r1(t)}^{r1(0)} f(r) dr, with r2^d - r1^d = v0
/// invariant.
class AnnulusSolution {
 public:
  AnnulusSolution(double r1_0, double r2_0, int dim = 2);

  int dim() const { return dim_; }
  double v0() const { return v0_; }
  double r1_initial() const { return r1_0_; }
  double r2_initial() const { return r2_0_; }

  /// f(r) = -dt/dr1 evaluated at r1 = r.
  double integrand(double r) const;
  /// Time needed for r1 to shrink from r1(0) to r.
  double elapsed(double r) const;
  /// T_0, the time at which r1 vanishes.
  double extinction_time() const { return T0_; }

  double r1_at(double t) const;
  double r2_from_r1(double r1) const;
  double r2_at(double t) const { return r2_from_r1(r1_at(t)); }
  AnnulusState state(double t) const;

 private:
  double r1_0_, r2_0_, v0_, T0_;
  int dim_;
};

/// Convenience wrapper: r1(t) for the d = 2 solution.
double r1_at(double t, double r1_0, double r2_0);

/// Radially symmetric u(z, t): (d-1)/r1 inside, -(d-1)/r2 outside and the
/// harmonic interpolant in between.
double exact_u(double radius, const AnnulusState& s);
double exact_u(const Vector2& z, const AnnulusState& s);

/// max_k min_i ||q_k| - r_i|.
double curve_error(const Curve& curve, const AnnulusState& s);

/// max_a |U_a - u(v_a, t)| over bulk mesh vertices.
double bulk_error(const BulkMesh& mesh, const VectorX& U, const AnnulusState& s);

}  // namespace mstrack
