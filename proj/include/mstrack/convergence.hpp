#pragma once

#include <mstrack/config.hpp>
#include <mstrack/reference.hpp>

#include <string>
#include <vector>

namespace mstrack {

struct LadderLevel {
  int level = 0;
  int fine = 128;      // N_f = 2^{7+i}
  int coarse = 1;      // N_c = 4^i
  double dt = 0.064;   // 4^{3-i} 10^{-3}
  Index vertices = 256;  // K = 2^{8+i}, split evenly over the two circles
};

LadderLevel ladder_level(int i);

struct ConvergenceRow {
  int level = 0;
  double h_f = 0;
  double h_gamma = 0;    // max element diameter of Gamma^M
  double err_u = 0;      // max_m ||U^m - I^m u(t_m)||_inf
  double err_gamma = 0;  // max_m max_k dist(q_k^m, Gamma(t_m))
  Index k_omega = 0;     // bulk vertices of the mesh adapted to Gamma^M
  Index k = 0;
  double v_rel = 0;      // |v_Delta^M|
  double wall_time = 0;  // seconds
  bool ok = true;
  std::string error;
};

struct ConvergenceStudy {
  LadderSpec ladder;
  Scheme scheme = Scheme::sp_fixed_point;
  Integration integration = Integration::exact;
  double H = 4.0;
  double tol = 1e-10;
  int max_iters = 100;
};

ConvergenceRow run_level(const ConvergenceStudy& study, int level);

/// Runs all ladder levels, at most `threads` at a time; failures are recorded
/// per row. Rows come back in the order of study.ladder.levels.
std::vector<ConvergenceRow> run_ladder(const ConvergenceStudy& study, int threads = 1);

/// Thread cap from MSTRACK_THREADS, defaulting to the hardware concurrency.
int thread_cap();

/// Columns: h_f, h_Gamma^M, err_U, err_Gamma, K_Omega^M, K, |v_Delta^M|, wall_time.
/// Failed levels keep h_f, K and wall_time; the other fields are nan.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace mstrack
