#include <mstrack/config.hpp>
#include <mstrack/convergence.hpp>
#include <mstrack/output.hpp>
#include <mstrack/reference.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#ifndef MSTRACK_PRESET_DIR
#define MSTRACK_PRESET_DIR "presets"
#endif

using namespace mstrack;

namespace {

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> levels;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = -1;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 0 || v > 4) throw ConfigError("--levels expects integers in 0..4, got '" + item + "'");
    levels.push_back(v);
  }
  if (levels.empty()) throw ConfigError("--levels is empty");
  return levels;
}

int cmd_simulate(const std::string& spec_name, const std::string& out_override, int snapshot_every) {
  ExperimentSpec spec = load_experiment(spec_name, MSTRACK_PRESET_DIR);
  if (!out_override.empty()) spec.output.directory = out_override;
  if (snapshot_every >= 0) spec.output.snapshot_every = snapshot_every;
  const Curve initial = make_curve(spec.shape, spec.scheme.mesh.H);

  RunRecorder recorder(spec.output.snapshot_times, spec.output.snapshot_every);
  int status = 0;
  try {
    const SimulationSummary s = run_simulation(initial, spec.scheme, [&](const StepRecord& r) { recorder.observe(r); });
    std::printf("%s: %ld steps to t = %.17e, max |v_rel| = %.3e, max stability residual = %.3e, max fp iters = %d\n",
                spec.name.c_str(), static_cast<long>(s.steps), s.final_time, s.max_abs_v_rel,
                s.max_stability_residual, s.max_fp_iters);
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    status = 2;
  }
  recorder.flush(spec.output.directory);
  std::printf("outputs written to %s\n", spec.output.directory.c_str());
  return status;
}

int cmd_converge(const std::string& spec_name, const std::string& levels_text, const std::string& scheme_name,
                 const std::string& integration_name, const std::string& out_override) {
  ExperimentSpec spec = load_experiment(spec_name, MSTRACK_PRESET_DIR);
  ConvergenceStudy study;
  study.ladder = spec.ladder;
  if (!levels_text.empty()) study.ladder.levels = parse_levels(levels_text);
  study.scheme = scheme_name.empty() ? spec.scheme.scheme : parse_scheme(scheme_name);
  study.integration = integration_name.empty() ? spec.scheme.integration : parse_integration(integration_name);
  study.H = spec.scheme.mesh.H;
  study.tol = spec.scheme.tol;
  study.max_iters = spec.scheme.max_iters;
  for (int l : study.ladder.levels)
    if (l >= 3) std::fprintf(stderr, "note: level %d is long-running\n", l);

  const std::string dir = out_override.empty() ? spec.output.directory : out_override;
  const auto rows = run_ladder(study, thread_cap());
  const std::string csv = convergence_csv(rows);
  const std::string path =
      (std::filesystem::path(dir) / ("convergence_" + to_string(study.scheme) + "_" + to_string(study.integration) + ".csv"))
          .string();
  atomic_write(path, csv);
  std::cout << csv;
  int status = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      std::fprintf(stderr, "level %d failed: %s\n", r.level, r.error.c_str());
      status = 2;
    }
  }
  std::printf("table written to %s\n", path.c_str());
  return status;
}

int cmd_exact(double t, double r1, double r2) {
  const AnnulusSolution s(r1, r2, 2);
  std::printf("T0 = %.17e\n", s.extinction_time());
  const double a = s.r1_at(t);
  std::printf("t = %.17e\nr1 = %.17e\nr2 = %.17e\n", t, a, s.r2_from_r1(a));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Front-tracking finite elements for the two-sided Mullins-Sekerka problem"};
  app.require_subcommand(1);

  std::string spec_name, out_dir;
  int snapshot_every = -1;
  auto* sim = app.add_subcommand("simulate", "run an experiment spec or preset");
  sim->add_option("spec", spec_name, "spec file or preset name")->required();
  sim->add_option("--out", out_dir, "output directory (overrides the spec)");
  sim->add_option("--snapshot-every", snapshot_every, "snapshot every N steps")->check(CLI::NonNegativeNumber);

  std::string levels, scheme, integration;
  auto* conv = app.add_subcommand("converge", "run the concentric-circle convergence ladder");
  conv->add_option("spec", spec_name, "spec file or preset name")->required();
  conv->add_option("--levels", levels, "comma separated levels, e.g. 0,1,2");
  conv->add_option("--scheme", scheme, "bgn-linear or sp-fixed-point");
  conv->add_option("--integration", integration, "lumped or true");
  conv->add_option("--out", out_dir, "output directory (overrides the spec)");

  double t = 0, r1 = 2.5, r2 = 3.0;
  auto* ex = app.add_subcommand("exact", "print the exact concentric-circle radii");
  ex->add_option("--t", t, "time")->required();
  ex->add_option("--r1", r1, "initial inner radius");
  ex->add_option("--r2", r2, "initial outer radius");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(spec_name, out_dir, snapshot_every);
    if (conv->parsed()) return cmd_converge(spec_name, levels, scheme, integration, out_dir);
    if (ex->parsed()) return cmd_exact(t, r1, r2);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
