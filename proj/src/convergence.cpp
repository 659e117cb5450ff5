#include <mstrack/convergence.hpp>

#include <mstrack/output.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace mstrack {

LadderLevel ladder_level(int i) {
  if (i < 0 || i > 4) throw ConfigError("ladder levels must lie in 0..4");
  LadderLevel l;
  l.level = i;
  l.fine = 1 << (7 + i);
  l.coarse = 1 << (2 * i);
  l.dt = std::ldexp(1e-3, 2 * (3 - i));
  l.vertices = Index(1) << (8 + i);
  return l;
}

ConvergenceRow run_level(const ConvergenceStudy& study, int level) {
  const auto start = std::chrono::steady_clock::now();
  ConvergenceRow row;
  row.level = level;
  try {
    const LadderLevel l = ladder_level(level);
    row.h_f = 2 * study.H / l.fine;
    row.k = l.vertices;
    SchemeConfig cfg;
    cfg.scheme = study.scheme;
    cfg.integration = study.integration;
    cfg.dt = l.dt;
    cfg.T = study.ladder.T;
    cfg.tol = study.tol;
    cfg.max_iters = study.max_iters;
    cfg.mesh.H = study.H;
    cfg.mesh.fine = l.fine;
    cfg.mesh.coarse = l.coarse;

    const AnnulusSolution exact(study.ladder.r1, study.ladder.r2, 2);
    const Curve initial = concentric_pair(study.ladder.r1, study.ladder.r2, l.vertices / 2);
    require_inside(initial, study.H);

    const SimulationSummary summary = run_simulation(initial, cfg, [&](const StepRecord& rec) {
      if (rec.m == 0) return;
      const AnnulusState s = exact.state(rec.t);
      row.err_gamma = std::max(row.err_gamma, curve_error(*rec.curve, s));
      row.err_u = std::max(row.err_u, bulk_error(*rec.mesh, rec.result->U, s));
      row.v_rel = std::abs(rec.diagnostics.v_rel);
    });
    row.h_gamma = max_element_diameter(summary.final_curve);
    row.k_omega = build_adaptive(summary.final_curve, cfg.mesh).num_vertices();
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

int thread_cap() {
  if (const char* env = std::getenv("MSTRACK_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ConvergenceRow> run_ladder(const ConvergenceStudy& study, int threads) {
  const auto& levels = study.ladder.levels;
  std::vector<ConvergenceRow> rows(levels.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < levels.size(); i = next++) rows[i] = run_level(study, levels[i]);
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, levels.size())));
  if (n == 1) {
    worker();
    return rows;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string s = "h_f,h_gamma,err_u,err_gamma,k_omega,k,v_rel,wall_time\n";
  const double nan = std::nan("");
  for (const auto& r : rows) {
    s += format_number(r.h_f);
    for (double x : {r.h_gamma, r.err_u, r.err_gamma}) s += ',' + format_number(r.ok ? x : nan);
    s += ',' + (r.ok ? std::to_string(r.k_omega) : std::string("nan")) + ',' + std::to_string(r.k) + ',' +
         format_number(r.ok ? r.v_rel : nan) + ',' + format_number(r.wall_time) + '\n';
  }
  return s;
}

}  // namespace mstrack
