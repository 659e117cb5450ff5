#include <mstrack/stepper.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

namespace mstrack {

std::string to_string(Scheme s) { return s == Scheme::bgn_linear ? "bgn_linear" : "sp_fixed_point"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "bgn_linear" || name == "bgn-linear") return Scheme::bgn_linear;
  if (name == "sp_fixed_point" || name == "sp-fixed-point") return Scheme::sp_fixed_point;
  throw ConfigError("unknown scheme '" + name + "' (expected bgn_linear or sp_fixed_point)");
}

void SchemeConfig::validate() const {
  if (!(dt > 0)) throw ConfigError("scheme.dt must be positive");
  if (!(tol > 0)) throw ConfigError("scheme.tol must be positive");
  if (!(T >= dt)) throw ConfigError("scheme.T must be at least dt");
  if (max_iters < 1) throw ConfigError("scheme.max_iters must be at least 1");
  if (!(mesh.H > 0)) throw ConfigError("mesh.H must be positive");
  auto pow2 = [](int n) { return n > 0 && (n & (n - 1)) == 0; };
  if (!pow2(mesh.fine) || !pow2(mesh.coarse)) throw ConfigError("mesh.fine and mesh.coarse must be powers of two");
  if (mesh.coarse > mesh.fine) throw ConfigError("mesh.coarse must not exceed mesh.fine");
}

double scheme_energy(const Curve& curve, const SchemeConfig& config) {
  return config.anisotropy ? anisotropic_energy(curve, *config.anisotropy) : curve_length(curve);
}

StepAssembler::StepAssembler(const Curve& curve, const BulkMesh& mesh, double dt, const SchemeConfig& config)
    : curve_(curve), dt_(dt), config_(config) {
  A_ = stiffness_matrix(mesh);
  coupling_ = assemble_coupling(curve, mesh, config.integration);
  update_surface_matrix(nullptr);
}

void StepAssembler::update_surface_matrix(const Matrix2X* lagged) {
  if (!config_.anisotropy) {
    if (S_.size() == 0) S_ = kron2(assemble_surface_operators(curve_).stiffness);
    return;
  }
  const Anisotropy& def = *config_.anisotropy;
  if (S_.size() != 0 && def.exponent() == 1.0) return;
  const Matrix2X normals = lagged && def.exponent() != 1.0 ? *lagged : element_normals(curve_);
  S_ = AnisotropicForm(curve_, normals, def).matrix();
}

StepResult StepAssembler::solve(const Matrix2X& omega, const Matrix2X* lagged) {
  if (lagged) update_surface_matrix(lagged);
  const Index nb = A_.rows();
  const Index k = curve_.num_vertices();
  const SparseMatrix& N = coupling_.N;

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(A_.nonZeros() + 4 * N.nonZeros() + S_.nonZeros()));
  for (Index c = 0; c < A_.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A_, c); it; ++it) t.emplace_back(it.row(), it.col(), dt_ * it.value());
  for (Index c = 0; c < N.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(N, c); it; ++it) {
      for (int d = 0; d < 2; ++d) {
        const double b = it.value() * omega(d, it.col());
        t.emplace_back(it.row(), nb + 2 * it.col() + d, -b);
        t.emplace_back(nb + 2 * it.col() + d, it.row(), b);
      }
    }
  }
  for (Index c = 0; c < S_.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(S_, c); it; ++it) t.emplace_back(nb + it.row(), nb + it.col(), it.value());
  SparseMatrix system(nb + 2 * k, nb + 2 * k);
  system.setFromTriplets(t.begin(), t.end());
  system.makeCompressed();

  if (!analyzed_) {
    solver_.analyzePattern(system);
    analyzed_ = true;
  }
  solver_.factorize(system);
  if (solver_.info() != Eigen::Success) throw SolverError("sparse factorization failed: " + solver_.lastErrorMessage());

  const Eigen::Map<const VectorX> q(curve_.positions().data(), 2 * k);
  VectorX rhs = VectorX::Zero(nb + 2 * k);
  rhs.tail(2 * k) = -(S_ * q);
  const VectorX sol = solver_.solve(rhs);
  if (solver_.info() != Eigen::Success || !sol.allFinite()) throw SolverError("linear solve failed");

  StepResult r;
  r.U = sol.head(nb);
  VectorX x = q + sol.tail(2 * k);
  r.X = Eigen::Map<const Matrix2X>(x.data(), 2, k);
  r.kappa = (N.transpose() * r.U).cwiseQuotient(coupling_.mass);
  r.diagnostics.dirichlet_energy = r.U.dot(A_ * r.U);
  return r;
}

StepResult linear_step(const Curve& curve, const BulkMesh& mesh, const Matrix2X& omega, double dt,
                       const SchemeConfig& config) {
  StepAssembler assembler(curve, mesh, dt, config);
  StepResult r = assembler.solve(omega);
  r.iterations = 1;
  r.increment = (r.X - curve.positions()).cwiseAbs().maxCoeff();
  return r;
}

StepResult fixed_point_step(const Curve& curve, const BulkMesh& mesh, double dt, const SchemeConfig& config) {
  StepAssembler assembler(curve, mesh, dt, config);
  const bool lag_normals = config.anisotropy && config.anisotropy->exponent() != 1.0;
  Matrix2X x = curve.positions();
  StepResult r;
  for (int i = 1;; ++i) {
    const Curve iterate = curve.with_positions(x);
    const Matrix2X omega = averaged_vertex_normal(curve, iterate);
    if (lag_normals) {
      const Matrix2X lagged = element_normals(iterate);
      r = assembler.solve(omega, &lagged);
    } else {
      r = assembler.solve(omega);
    }
    r.iterations = i;
    r.increment = (r.X - x).cwiseAbs().maxCoeff();
    r.converged = r.increment <= config.tol;
    if (r.converged) return r;
    if (i >= config.max_iters) {
      if (config.accept_unconverged) return r;
      char buf[160];
      std::snprintf(buf, sizeof buf, "fixed-point iteration did not converge in %d iterations (last update %.3e)",
                    i, r.increment);
      throw NonConvergenceError(buf, r.increment);
    }
    x = r.X;
  }
}

StepResult advance(const Curve& curve, const BulkMesh& mesh, double dt, const SchemeConfig& config) {
  if (config.scheme == Scheme::bgn_linear) return linear_step(curve, mesh, vertex_normal(curve), dt, config);
  return fixed_point_step(curve, mesh, dt, config);
}

SimulationSummary run_simulation(const Curve& initial, const SchemeConfig& config, const StepObserver& observer) {
  config.validate();
  SimulationSummary summary;
  Curve curve = initial;
  const double vol0 = enclosed_volume(curve);
  double energy = scheme_energy(curve, config);

  StepDiagnostics d0;
  d0.energy = curve_length(curve);
  d0.energy_aniso = energy;
  d0.volume = vol0;
  d0.equi_ratio = equidistribution_ratio(curve);
  if (observer) observer({0, 0.0, 0.0, &curve, nullptr, nullptr, d0});

  double t = 0;
  Index m = 0;
  bool warned = false;
  while (t < config.T) {
    double t_next = std::min(static_cast<double>(m + 1) * config.dt, config.T);
    if (config.T - t_next <= 1e-12 * config.dt) t_next = config.T;
    const double dt = t_next - t;
    if (!(dt > 0)) break;

    const BulkMesh mesh = build_adaptive(curve, config.mesh);
    StepResult r = advance(curve, mesh, dt, config);
    Curve next = curve.with_positions(r.X);

    StepDiagnostics& d = r.diagnostics;
    d.energy = curve_length(next);
    const double new_energy = scheme_energy(next, config);
    d.energy_aniso = new_energy;
    d.volume = enclosed_volume(next);
    d.v_rel = (vol0 - d.volume) / vol0;
    d.stability_residual = new_energy + dt * d.dirichlet_energy - energy;
    d.fp_iters = r.iterations;
    d.equi_ratio = equidistribution_ratio(next);
    d.self_intersection = has_self_intersection(next);
    if (d.self_intersection && !warned) {
      std::cerr << "warning: curve self-intersects at t = " << t_next << '\n';
      warned = true;
    }

    ++m;
    t = t_next;
    curve = std::move(next);
    energy = new_energy;
    summary.max_abs_v_rel = std::max(summary.max_abs_v_rel, std::abs(d.v_rel));
    summary.max_stability_residual = std::max(summary.max_stability_residual, d.stability_residual);
    summary.self_intersection = summary.self_intersection || d.self_intersection;
    summary.max_fp_iters = std::max(summary.max_fp_iters, d.fp_iters);
    if (observer) observer({m, t, dt, &curve, &mesh, &r, d});
  }
  summary.final_curve = curve;
  summary.steps = m;
  summary.final_time = t;
  return summary;
}

}  // namespace mstrack
