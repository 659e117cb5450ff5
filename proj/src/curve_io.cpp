#include <mstrack/curve_io.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mstrack {

namespace {
std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}
}  // namespace

void write_polyline(std::ostream& out, const Curve& curve) {
  for (Index l = 0; l < curve.num_loops(); ++l) {
    if (l > 0) out << '\n';
    out << "# component " << l << ", " << curve.loop_size(l) << " vertices, closed\n";
    for (Index k = curve.loop_begin(l); k < curve.loop_end(l); ++k)
      out << format_number(curve.vertex(k).x()) << ' ' << format_number(curve.vertex(k).y()) << '\n';
  }
}

Curve read_polyline(std::istream& in) {
  std::vector<std::vector<Vector2>> loops;
  std::string line;
  bool open = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      open = false;
      continue;
    }
    if (line[first] == '#') {
      loops.emplace_back();
      open = true;
      continue;
    }
    if (!open) {
      loops.emplace_back();
      open = true;
    }
    std::istringstream row(line);
    double x = 0, y = 0;
    if (!(row >> x >> y))
      throw ConfigError("polyline line " + std::to_string(line_no) + ": expected 'x y'");
    loops.back().emplace_back(x, y);
  }
  std::vector<Matrix2X> mats;
  for (const auto& loop : loops) {
    if (loop.empty()) continue;
    Matrix2X m(2, static_cast<Index>(loop.size()));
    for (std::size_t i = 0; i < loop.size(); ++i) m.col(static_cast<Index>(i)) = loop[i];
    mats.push_back(std::move(m));
  }
  return Curve(mats);
}

void save_polyline(const std::string& path, const Curve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_polyline(out, curve);
}

Curve load_polyline(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_polyline(in);
}

}  // namespace mstrack
