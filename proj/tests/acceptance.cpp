// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <mstrack/config.hpp>
#include <mstrack/convergence.hpp>
#include <mstrack/shapes.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace mstrack;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int n, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d (%s): %s: %s\n", n, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Curve random_star(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(0, 1);
  Matrix2X p(2, n);
  for (Index k = 0; k < n; ++k) {
    const double a = 2 * kPi * (static_cast<double>(k) + 0.4 * u(rng)) / static_cast<double>(n);
    const double r = 1 + 0.3 * u(rng);
    p.col(k) << r * std::cos(a), r * std::sin(a);
  }
  return Curve({p});
}

// Criterion 5: geometric identities.
void geometric_identities() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  double vol = 0, stat = 0, kernel = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 8 + static_cast<Index>(trial % 57);
    const Curve old_curve = random_star(rng, n);
    Matrix2X x = old_curve.positions();
    for (Index k = 0; k < n; ++k) x.col(k) += 0.05 * Vector2(u(rng), u(rng));
    const auto id = volume_difference_identity(old_curve, old_curve.with_positions(x));
    vol = std::max(vol, std::abs(id.lhs - id.rhs) / enclosed_volume(old_curve));
    stat = std::max(stat, (averaged_element_normals(old_curve, old_curve) - element_normals(old_curve))
                              .cwiseAbs()
                              .maxCoeff());
    stat = std::max(stat, (averaged_vertex_normal(old_curve, old_curve) - vertex_normal(old_curve))
                              .cwiseAbs()
                              .maxCoeff());

    // Time average of the area-weighted normal of the linearly interpolated triangle, by 3-point Gauss.
    std::array<Vec3<double>, 3> t0, t1;
    for (std::size_t i = 0; i < 3; ++i) {
      t0[i] = Vec3<double>(u(rng), u(rng), u(rng));
      t1[i] = t0[i] + 0.3 * Vec3<double>(u(rng), u(rng), u(rng));
    }
    const double g = std::sqrt(0.6);
    const double nodes[3] = {0.5 * (1 - g), 0.5, 0.5 * (1 + g)};
    const double weights[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    Vec3<double> q = Vec3<double>::Zero();
    for (int i = 0; i < 3; ++i) {
      std::array<Vec3<double>, 3> t;
      for (std::size_t v = 0; v < 3; ++v) t[v] = (1 - nodes[i]) * t0[v] + nodes[i] * t1[v];
      q += weights[i] * (t[1] - t[0]).cross(t[2] - t[0]);
    }
    q /= (t0[1] - t0[0]).cross(t0[2] - t0[0]).norm();
    kernel = std::max(kernel, (averaged_element_normal_3d(t0, t1) - q).norm() / std::max(1.0, q.norm()));
  }
  std::ostringstream d;
  d << "volume identity " << vol << " (<= 1e-12), stationary reduction " << stat << " (<= 1e-13), 3d kernel "
    << kernel << " (<= 1e-12)";
  report(5, "geometric identities", vol <= 1e-12 && stat <= 1e-13 && kernel <= 1e-12, d.str());
}

// Criterion 6: anisotropy identities and the identity-metric scheme check.
void anisotropy_suite() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::vector<Anisotropy> densities = {
      make_octagon_density(1e-4), make_octagon_density(1e-2),
      make_rotated_diag({{0.3, 1.0, 0.2, 1.0}, {1.1, 0.5, 2.0, 0.7}}, 1.0),
      make_rotated_diag({{0.3, 1.0, 0.2, 1.0}, {1.1, 0.5, 2.0, 0.7}}, 2.0),
      make_rotated_diag({{0.0, 1.0, 0.05, 1.0}, {kPi / 3, 1.0, 0.05, 1.0}, {2 * kPi / 3, 1.0, 0.05, 1.0}}, 3.5)};
  double euler = 0, fd = 0;
  for (int i = 0; i < 10000; ++i) {
    const Anisotropy& g = densities[static_cast<std::size_t>(i) % densities.size()];
    const Vector2 p(u(rng), u(rng));
    if (p.norm() < 1e-3) continue;
    euler = std::max(euler, std::abs(g.gradient(p).dot(p) - g(p)) / g(p));
    // Step balancing truncation against rounding for the nearly crystalline density.
    const double h = 1e-7 * p.norm();
    Vector2 diff;
    for (int c = 0; c < 2; ++c) {
      Vector2 e = Vector2::Zero();
      e[c] = h;
      diff[c] = (g(p + e) - g(p - e)) / (2 * h);
    }
    fd = std::max(fd, (diff - g.gradient(p)).norm() / std::max(1.0, g.gradient(p).norm()));
  }
  // Planar metric identity on random SPD matrices, through the dual metric used by the scheme.
  double metric = 0;
  for (int i = 0; i < 10000; ++i) {
    Matrix2 a;
    a << u(rng), u(rng), u(rng), u(rng);
    Matrix2 g = a * a.transpose() + 0.05 * Matrix2::Identity();
    g(1, 0) = g(0, 1);
    const Anisotropy def({g}, 1.0);
    const Vector2 nu = Vector2(u(rng), u(rng)).normalized();
    const Vector2 tau(nu.y(), -nu.x());
    const double lhs = tau.dot(def.dual_metric(0) * tau);
    const double rhs = nu.dot(g * nu);
    metric = std::max(metric, std::abs(lhs - rhs) / rhs);
  }
  // Identity metric (L = 1, r = 1, G = I) against the isotropic scheme over 20 steps.
  SchemeConfig iso;
  iso.scheme = Scheme::sp_fixed_point;
  iso.dt = 1e-3;
  iso.T = 0.02;
  iso.mesh = MeshParams{4.0, 128, 16, 0.05};
  SchemeConfig an = iso;
  an.anisotropy = Anisotropy({Matrix2::Identity()}, 1.0);
  const Curve start = stadium(7, 1, 256);
  VectorX u_iso, u_an;
  const SimulationSummary a = run_simulation(start, iso, [&](const StepRecord& r) {
    if (r.result) u_iso = r.result->U;
  });
  const SimulationSummary b = run_simulation(start, an, [&](const StepRecord& r) {
    if (r.result) u_an = r.result->U;
  });
  const double scheme = std::max((a.final_curve.positions() - b.final_curve.positions()).cwiseAbs().maxCoeff(),
                                 (u_iso - u_an).cwiseAbs().maxCoeff());
  std::ostringstream d;
  d << "Euler " << euler << " (<= 1e-12), gradient vs central differences " << fd << " (<= 1e-6), metric identity "
    << metric << " (<= 1e-13), identity-metric scheme " << scheme << " (<= 1e-10)";
  report(6, "anisotropy suite", euler <= 1e-12 && fd <= 1e-6 && metric <= 1e-13 && scheme <= 1e-10, d.str());
}

ConvergenceRow level(Scheme s, Integration v, int i) {
  ConvergenceStudy study;
  study.scheme = s;
  study.integration = v;
  const ConvergenceRow row = run_level(study, i);
  std::printf("  ladder %s/%s level %d: err_gamma %.4e err_u %.4e |v| %.4e K_Omega %ld wall %.1fs%s%s\n",
              to_string(s).c_str(), to_string(v).c_str(), i, row.err_gamma, row.err_u, row.v_rel,
              static_cast<long>(row.k_omega), row.wall_time, row.ok ? "" : " error: ", row.error.c_str());
  std::fflush(stdout);
  return row;
}

void convergence_criteria() {
  const ConvergenceRow t0 = level(Scheme::sp_fixed_point, Integration::exact, 0);
  const ConvergenceRow t1 = level(Scheme::sp_fixed_point, Integration::exact, 1);
  const ConvergenceRow l0 = level(Scheme::sp_fixed_point, Integration::lumped, 0);
  const ConvergenceRow l1 = level(Scheme::sp_fixed_point, Integration::lumped, 1);
  const ConvergenceRow b0 = level(Scheme::bgn_linear, Integration::exact, 0);
  const ConvergenceRow b1 = level(Scheme::bgn_linear, Integration::exact, 1);

  bool ok = true;
  double worst = 0;
  for (const ConvergenceRow* r : {&t0, &t1, &l0, &l1}) {
    ok = ok && r->ok && r->v_rel < 1e-9;
    worst = std::max(worst, r->v_rel);
  }
  report(1, "volume conservation", ok, fmt("max |v_Delta^M| over 4 runs %.3e (< 1e-9)", worst));

  const double ratio = t0.err_gamma / t1.err_gamma;
  std::ostringstream d2;
  d2 << "err_gamma " << t0.err_gamma << " in [1.7e-2, 6.8e-2], err_u " << t0.err_u
     << " in [7.8e-2, 3.2e-1], level 0/1 curve error ratio " << ratio << " in [1.5, 2.6]";
  report(2, "convergence magnitudes",
         t0.ok && t1.ok && t0.err_gamma >= 1.7e-2 && t0.err_gamma <= 6.8e-2 && t0.err_u >= 7.8e-2 &&
             t0.err_u <= 3.2e-1 && ratio >= 1.5 && ratio <= 2.6,
         d2.str());

  const double drift = b0.v_rel / b1.v_rel;
  std::ostringstream d3;
  d3 << "|v_Delta^M| " << b0.v_rel << " in [6e-3, 2.4e-2], level 0/1 ratio " << drift << " in [2.5, 6]";
  report(3, "linear-scheme volume drift",
         b0.ok && b1.ok && b0.v_rel >= 6e-3 && b0.v_rel <= 2.4e-2 && drift >= 2.5 && drift <= 6, d3.str());
}

struct RunStats {
  double max_residual = -INFINITY;  // max (E_new + dt D - E_old) / E_old
  Index steps = 0;
  Index reflex_steps = 0;
  bool energy_monotone = true;
  double seconds = 0;
  Curve final_curve;
  double initial_volume = 0;
};

RunStats run_preset(const std::string& name) {
  const ExperimentSpec spec = load_experiment(name, MSTRACK_PRESET_DIR);
  const Curve initial = make_curve(spec.shape, spec.scheme.mesh.H);
  RunStats s;
  s.initial_volume = enclosed_volume(initial);
  double prev = scheme_energy(initial, spec.scheme);
  const auto start = std::chrono::steady_clock::now();
  const SimulationSummary sum = run_simulation(initial, spec.scheme, [&](const StepRecord& r) {
    if (r.m == 0) return;
    const double energy = spec.scheme.anisotropy ? r.diagnostics.energy_aniso : r.diagnostics.energy;
    s.max_residual = std::max(s.max_residual, r.diagnostics.stability_residual / prev);
    if (energy > prev) s.energy_monotone = false;
    if (count_reflex_vertices(*r.curve, 1e-6) > 0) ++s.reflex_steps;
    prev = energy;
  });
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  s.steps = sum.steps;
  s.final_curve = sum.final_curve;
  std::printf("  %s: %ld steps in %.1fs, max relative stability residual %.3e, steps with reflex vertices %ld\n",
              name.c_str(), static_cast<long>(s.steps), s.seconds, s.max_residual, static_cast<long>(s.reflex_steps));
  std::fflush(stdout);
  return s;
}

double radial_deviation(const Curve& c, double area) {
  // Area centroid of the polygon.
  Vector2 centroid = Vector2::Zero();
  double twice = 0;
  for (Index j = 0; j < c.num_elements(); ++j) {
    const Vector2 a = c.vertex(j), b = c.vertex(c.next(j));
    const double w = a.x() * b.y() - b.x() * a.y();
    twice += w;
    centroid += w * (a + b);
  }
  centroid /= 3 * twice;
  const double radius = std::sqrt(area / kPi);
  double dev = 0;
  for (Index k = 0; k < c.num_vertices(); ++k)
    dev = std::max(dev, std::abs((Vector2(c.vertex(k)) - centroid).norm() - radius) / radius);
  return dev;
}

double max_facet_deviation_degrees(const Curve& c) {
  double worst = 0;
  for (Index j = 0; j < c.num_elements(); ++j) {
    const Vector2 nu = element_normal(c, j);
    const double a = std::atan2(nu.y(), nu.x()) * 180 / kPi;
    const double r = std::remainder(a, 45.0);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

void experiment_criteria() {
  const RunStats cigar = run_preset("cigar");
  const RunStats octagon = run_preset("octagon");

  std::ostringstream d4;
  d4 << "max (E_new + dt |grad U|^2 - E_old) / E_old: cigar " << cigar.max_residual << ", octagon "
     << octagon.max_residual << " (<= 1e-11); runtime " << cigar.seconds + octagon.seconds << "s (<= 600s)";
  report(4, "per-step stability",
         cigar.max_residual <= 1e-11 && octagon.max_residual <= 1e-11 && cigar.seconds + octagon.seconds <= 600,
         d4.str());

  const double dev = radial_deviation(cigar.final_curve, cigar.initial_volume);
  const double facet = max_facet_deviation_degrees(octagon.final_curve);
  std::ostringstream d7;
  d7 << "cigar steps with a reflex vertex " << cigar.reflex_steps << " (> 0), final radial deviation " << dev
     << " (<= 0.01); octagon max facet deviation " << facet << " deg (<= 2), |Gamma|_gamma monotone "
     << (octagon.energy_monotone ? "yes" : "no");
  report(7, "qualitative dynamics",
         cigar.reflex_steps > 0 && dev <= 0.01 && facet <= 2 && octagon.energy_monotone, d7.str());

  const double equi = equidistribution_ratio(cigar.final_curve);
  report(8, "mesh quality", equi <= 1.1, fmt("cigar final equidistribution ratio %.4f (<= 1.1)", equi));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  geometric_identities();
  anisotropy_suite();
  convergence_criteria();
  experiment_criteria();
  std::printf("%d criteria failed; total %.1fs\n", failures,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return failures == 0 ? 0 : 1;
}
