#pragma once

#include <mstrack/stepper.hpp>

#include <string>
#include <vector>

namespace mstrack {

/// Writes `content` to a temporary sibling and renames it over `path`.
void atomic_write(const std::string& path, const std::string& content);

/// %.17e formatting.
std::string format_number(double x);

std::string diagnostics_header();
std::string diagnostics_row(Index m, double t, const StepDiagnostics& d);

struct Snapshot {
  Index m = 0;
  double t = 0;
  Curve curve;
};

/// Collects diagnostics rows and curve snapshots of a run and writes them on
/// flush: diagnostics.csv, snapshots/snap_NNNNN.txt with snapshots/index.csv,
/// overlay.svg (all snapshots), energy.svg and volume.svg.
class RunRecorder {
 public:
  RunRecorder(std::vector<double> snapshot_times, int snapshot_every);

  void observe(const StepRecord& record);
  void flush(const std::string& directory) const;

  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  const std::string& csv() const { return csv_; }

 private:
  bool wants_snapshot(Index m, double t, double dt);

  std::vector<double> times_;
  std::vector<bool> taken_;
  int every_ = 0;
  std::string csv_;
  std::vector<Snapshot> snapshots_;
  std::vector<double> t_series_, energy_series_, vrel_series_;
};

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Polyline overlay of several curves in a square frame with equal axes.
std::string curves_svg(const std::vector<Snapshot>& snapshots, const std::string& title);

/// Simple line chart with linear axes.
std::string line_chart_svg(const std::vector<SvgSeries>& series, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel);

}  // namespace mstrack
