#pragma once

#include <mstrack/anisotropy.hpp>
#include <mstrack/bulk_mesh.hpp>
#include <mstrack/coupling.hpp>

#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace mstrack {

enum class Scheme { bgn_linear, sp_fixed_point };

std::string to_string(Scheme s);
/// Accepts bgn_linear / bgn-linear and sp_fixed_point / sp-fixed-point.
Scheme parse_scheme(const std::string& name);

struct SchemeConfig {
  Scheme scheme = Scheme::sp_fixed_point;
  Integration integration = Integration::lumped;
  std::optional<Anisotropy> anisotropy;
  double dt = 1e-3;
  double T = 1.0;
  double tol = 1e-10;
  int max_iters = 100;
  /// Return the last iterate instead of failing when max_iters is reached.
  bool accept_unconverged = false;
  MeshParams mesh;

  void validate() const;
};

struct StepDiagnostics {
  double energy = 0;        // |Gamma^{m+1}|
  double energy_aniso = 0;  // |Gamma^{m+1}|_gamma (equals energy when isotropic)
  double volume = 0;
  double v_rel = 0;
  double dirichlet_energy = 0;
  double stability_residual = 0;
  int fp_iters = 0;
  double equi_ratio = 0;
  bool self_intersection = false;
};

struct StepResult {
  VectorX U;      // bulk nodal values U^{m+1}
  Matrix2X X;     // new vertex positions X^{m+1}
  VectorX kappa;  // kappa^{m+1} or kappa_gamma^{m+1}
  int iterations = 1;
  double increment = 0;  // last fixed-point update ||X^{i+1} - X^i||_inf
  bool converged = true;
  StepDiagnostics diagnostics;
};

/// Assembles and solves the coupled system of one time step on Gamma^m for
/// given vertex normals omega, in the unknowns U and dX = X - q^m:
///   [dt A_Omega  -B] [U ]   [   0  ]
///   [B^T          S] [dX] = [-S q^m]
/// with B = N W(omega) and S the (anisotropic) surface stiffness. kappa is
/// recovered from the lumped mass, kappa = M^{-1} N^T U.
class StepAssembler {
 public:
  StepAssembler(const Curve& curve, const BulkMesh& mesh, double dt, const SchemeConfig& config);

  /// One linear solve; `lagged` are per-element normals of the current
  /// iterate for the anisotropic weight (ignored unless r > 1).
  StepResult solve(const Matrix2X& omega, const Matrix2X* lagged = nullptr);

  const SparseMatrix& bulk_stiffness() const { return A_; }
  const CouplingMatrices& coupling() const { return coupling_; }
  const SparseMatrix& surface_matrix() const { return S_; }

 private:
  void update_surface_matrix(const Matrix2X* lagged);

  const Curve& curve_;
  double dt_;
  const SchemeConfig& config_;
  SparseMatrix A_;
  CouplingMatrices coupling_;
  SparseMatrix S_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> solver_;
  bool analyzed_ = false;
};

StepResult linear_step(const Curve& curve, const BulkMesh& mesh, const Matrix2X& omega, double dt,
                       const SchemeConfig& config);

/// Lagged iteration with omega^{m+1/2,i} from Gamma^{m+1,i}, starting at
/// Gamma^{m+1,0} = Gamma^m, until ||X^{i+1} - X^i||_inf <= tol.
StepResult fixed_point_step(const Curve& curve, const BulkMesh& mesh, double dt, const SchemeConfig& config);

/// Dispatch on config.scheme.
StepResult advance(const Curve& curve, const BulkMesh& mesh, double dt, const SchemeConfig& config);

/// |Gamma| or |Gamma|_gamma, whichever the scheme dissipates.
double scheme_energy(const Curve& curve, const SchemeConfig& config);

struct StepRecord {
  Index m = 0;       // index of the new time level
  double t = 0;      // t_m
  double dt = 0;     // step that produced it (0 for the initial record)
  const Curve* curve = nullptr;     // Gamma^m
  const BulkMesh* mesh = nullptr;   // mesh the step was solved on (null at m = 0)
  const StepResult* result = nullptr;  // null at m = 0
  StepDiagnostics diagnostics;
};

using StepObserver = std::function<void(const StepRecord&)>;

struct SimulationSummary {
  Curve final_curve;
  Index steps = 0;
  double final_time = 0;
  double max_abs_v_rel = 0;
  double max_stability_residual = 0;
  bool self_intersection = false;
  int max_fp_iters = 0;
};

/// Time loop with uniform steps and a clipped final step ending at T exactly.
/// The observer sees the initial state and every completed step.
SimulationSummary run_simulation(const Curve& initial, const SchemeConfig& config,
                                 const StepObserver& observer = {});

}  // namespace mstrack
