#pragma once

#include <mstrack/shapes.hpp>
#include <mstrack/stepper.hpp>

#include <string>
#include <vector>

namespace mstrack {

struct OutputSpec {
  std::string directory;
  std::vector<double> snapshot_times;
  int snapshot_every = 0;  // 0 disables cadence-based snapshots
};

/// Refinement ladder for the concentric-circle convergence study. Level i uses
/// N_f = 2^{7+i}, N_c = 4^i, dt = 4^{3-i} 10^{-3} and K = 2^{8+i} vertices.
struct LadderSpec {
  std::vector<int> levels = {0, 1};
  double r1 = 2.5;
  double r2 = 3.0;
  double T = 0.5;
};

struct ExperimentSpec {
  std::string name;
  ShapeSpec shape;
  SchemeConfig scheme;
  OutputSpec output;
  bool has_ladder = false;
  LadderSpec ladder;
};

/// Parses a JSON experiment description. `source` names the input in error
/// messages, which carry the offending field path and line.
ExperimentSpec parse_experiment(const std::string& text, const std::string& source = "<spec>");

/// Reads a spec file, or a preset name looked up as <preset_dir>/<name>.json.
ExperimentSpec load_experiment(const std::string& path_or_preset, const std::string& preset_dir);

}  // namespace mstrack
