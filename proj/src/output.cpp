#include <mstrack/output.hpp>

#include <mstrack/curve_io.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace mstrack {

namespace fs = std::filesystem;

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

std::string diagnostics_header() {
  return "m,t,energy,energy_aniso,volume,v_rel,dirichlet_energy,stability_residual,fp_iters,equi_ratio\n";
}

std::string diagnostics_row(Index m, double t, const StepDiagnostics& d) {
  std::string s = std::to_string(m);
  for (double x : {t, d.energy, d.energy_aniso, d.volume, d.v_rel, d.dirichlet_energy, d.stability_residual}) {
    s += ',';
    s += format_number(x);
  }
  s += ',' + std::to_string(d.fp_iters) + ',' + format_number(d.equi_ratio) + '\n';
  return s;
}

RunRecorder::RunRecorder(std::vector<double> snapshot_times, int snapshot_every)
    : times_(std::move(snapshot_times)), taken_(times_.size(), false), every_(snapshot_every) {
  csv_ = diagnostics_header();
}

bool RunRecorder::wants_snapshot(Index m, double t, double dt) {
  bool want = every_ > 0 && m % every_ == 0;
  const double slack = std::max(0.5 * dt, 1e-12);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!taken_[i] && t >= times_[i] - slack) {
      taken_[i] = true;
      want = true;
    }
  }
  return want;
}

void RunRecorder::observe(const StepRecord& record) {
  csv_ += diagnostics_row(record.m, record.t, record.diagnostics);
  t_series_.push_back(record.t);
  energy_series_.push_back(record.diagnostics.energy_aniso);
  vrel_series_.push_back(record.diagnostics.v_rel);
  if (wants_snapshot(record.m, record.t, record.dt)) snapshots_.push_back({record.m, record.t, *record.curve});
}

void RunRecorder::flush(const std::string& directory) const {
  const fs::path dir(directory);
  fs::create_directories(dir / "snapshots");
  atomic_write((dir / "diagnostics.csv").string(), csv_);
  std::string index = "index,m,t,file\n";
  for (std::size_t i = 0; i < snapshots_.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05zu.txt", i);
    std::ostringstream body;
    write_polyline(body, snapshots_[i].curve);
    atomic_write((dir / "snapshots" / name).string(), body.str());
    index += std::to_string(i) + ',' + std::to_string(snapshots_[i].m) + ',' + format_number(snapshots_[i].t) + ',' +
             name + '\n';
  }
  atomic_write((dir / "snapshots" / "index.csv").string(), index);
  atomic_write((dir / "overlay.svg").string(), curves_svg(snapshots_, "curve snapshots"));
  atomic_write((dir / "energy.svg").string(),
               line_chart_svg({{"energy", t_series_, energy_series_}}, "energy", "t", "energy"));
  atomic_write((dir / "volume.svg").string(),
               line_chart_svg({{"v_rel", t_series_, vrel_series_}}, "relative volume loss", "t", "v_rel"));
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string svg_open(int w, int h) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return s.str();
}

}  // namespace

std::string curves_svg(const std::vector<Snapshot>& snapshots, const std::string& title) {
  const int size = 600, margin = 30;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : snapshots) {
    lo = std::min(lo, s.curve.positions().minCoeff());
    hi = std::max(hi, s.curve.positions().maxCoeff());
  }
  if (!(hi > lo)) {
    lo = -1;
    hi = 1;
  }
  const double scale = (size - 2 * margin) / (hi - lo);
  std::ostringstream s;
  s << svg_open(size, size) << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const Curve& c = snapshots[i].curve;
    for (Index l = 0; l < c.num_loops(); ++l) {
      s << "<polygon fill=\"none\" stroke-width=\"1\" stroke=\"" << kPalette[i % 8] << "\" points=\"";
      for (Index k = c.loop_begin(l); k < c.loop_end(l); ++k) {
        const double x = margin + (c.vertex(k).x() - lo) * scale;
        const double y = size - margin - (c.vertex(k).y() - lo) * scale;
        s << x << ',' << y << ' ';
      }
      s << "\"><title>t = " << snapshots[i].t << "</title></polygon>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::string line_chart_svg(const std::vector<SvgSeries>& series, const std::string& title, const std::string& xlabel,
                           const std::string& ylabel) {
  const int w = 640, h = 400, left = 90, right = 20, top = 30, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double x : s.x) x0 = std::min(x0, x), x1 = std::max(x1, x);
    for (double y : s.y) y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (!(x1 > x0)) x0 -= 1, x1 += 1;
  if (!(y1 > y0)) {
    const double pad = std::max(1e-300, std::abs(y0) * 1e-3);
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };
  std::ostringstream s;
  s << svg_open(w, h) << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\""
    << h - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[64];
  for (int i = 0; i <= 4; ++i) {
    const double yv = y0 + (y1 - y0) * i / 4, xv = x0 + (x1 - x0) * i / 4;
    std::snprintf(buf, sizeof buf, "%.4g", yv);
    s << "<text x=\"" << left - 5 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"10\" text-anchor=\"end\">" << buf
      << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    s << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 15 << "\" font-size=\"10\" text-anchor=\"middle\">"
      << buf << "</text>\n";
  }
  s << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 10 << "\" font-size=\"12\" text-anchor=\"middle\">"
    << xlabel << "</text>\n";
  s << "<text x=\"15\" y=\"" << (top + h - bottom) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 "
    << (top + h - bottom) / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    s << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[i % 8] << "\" points=\"";
    for (std::size_t k = 0; k < series[i].x.size() && k < series[i].y.size(); ++k)
      s << px(series[i].x[k]) << ',' << py(series[i].y[k]) << ' ';
    s << "\"><title>" << series[i].label << "</title></polyline>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace mstrack
