#include <mstrack/config.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace mstrack {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ":" << line_of(path) << ": field '" << path << "': " << what;
    throw ConfigError(msg.str());
  }

  const json& section(const json& parent, const std::string& path, const std::string& key, bool required) const {
    static const json null_value;
    const std::string full = join(path, key);
    if (!parent.contains(key)) {
      if (required) fail(full, "missing required section");
      return null_value;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) fail(full, "expected an object");
    return v;
  }

  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
      if (!ok.count(k)) fail(join(path, k), "unknown field");
  }

  double number(const json& obj, const std::string& path, const std::string& key, std::optional<double> fallback) const {
    const std::string full = join(path, key);
    if (!obj.contains(key)) {
      if (!fallback) fail(full, "missing required field");
      return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(full, "expected a number");
    return v.get<double>();
  }

  long integer(const json& obj, const std::string& path, const std::string& key, std::optional<long> fallback) const {
    const std::string full = join(path, key);
    if (!obj.contains(key)) {
      if (!fallback) fail(full, "missing required field");
      return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(full, "expected an integer");
    return v.get<long>();
  }

  std::string string(const json& obj, const std::string& path, const std::string& key,
                     std::optional<std::string> fallback) const {
    const std::string full = join(path, key);
    if (!obj.contains(key)) {
      if (!fallback) fail(full, "missing required field");
      return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) fail(full, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const std::string& key) const {
    const std::string full = join(path, key);
    if (!obj.contains(key)) return {};
    const json& v = obj.at(key);
    if (!v.is_array()) fail(full, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(full, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  /// Line of the deepest path segment found by scanning the text in order.
  int line_of(const std::string& path) const {
    std::size_t pos = 0, found = std::string::npos;
    std::stringstream ss(path);
    std::string seg;
    while (std::getline(ss, seg, '.')) {
      const std::size_t p = text_.find("\"" + seg + "\"", pos);
      if (p == std::string::npos) break;
      found = p;
      pos = p + seg.size() + 2;
    }
    if (found == std::string::npos) return 1;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
  }

 private:
  const std::string& text_;
  std::string source_;
};

template <class F>
auto guarded(const Reader& r, const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    r.fail(path, e.what());
  }
}

Anisotropy read_anisotropy(const Reader& r, const json& a) {
  const std::string path = "anisotropy";
  r.check_keys(a, path, {"preset", "delta", "r", "matrices", "rotated_diag"});
  if (a.contains("preset")) {
    const std::string preset = r.string(a, path, "preset", std::nullopt);
    if (preset != "octagon") r.fail(path + ".preset", "unknown preset '" + preset + "' (expected octagon)");
    const double delta = r.number(a, path, "delta", 1e-4);
    return guarded(r, path + ".delta", [&] { return make_octagon_density(delta); });
  }
  const double exponent = r.number(a, path, "r", 1.0);
  if (a.contains("matrices")) {
    const json& m = a.at("matrices");
    if (!m.is_array() || m.empty()) r.fail(path + ".matrices", "expected a non-empty array of [g11, g12, g21, g22]");
    std::vector<Matrix2> g;
    for (const auto& entry : m) {
      if (!entry.is_array() || entry.size() != 4)
        r.fail(path + ".matrices", "each matrix must be [g11, g12, g21, g22]");
      Matrix2 mat;
      for (int i = 0; i < 4; ++i) {
        if (!entry[static_cast<std::size_t>(i)].is_number()) r.fail(path + ".matrices", "matrix entries must be numbers");
        mat(i / 2, i % 2) = entry[static_cast<std::size_t>(i)].get<double>();
      }
      g.push_back(mat);
    }
    return guarded(r, path + ".matrices", [&] { return Anisotropy(std::move(g), exponent); });
  }
  if (a.contains("rotated_diag")) {
    const json& m = a.at("rotated_diag");
    const std::string p = path + ".rotated_diag";
    if (!m.is_array() || m.empty()) r.fail(p, "expected a non-empty array");
    std::vector<RotatedDiag> entries;
    for (const auto& e : m) {
      if (!e.is_object()) r.fail(p, "entries must be objects with angle, diag, scale");
      r.check_keys(e, p, {"angle", "diag", "scale"});
      RotatedDiag d;
      d.angle = r.number(e, p, "angle", 0.0);
      const std::vector<double> diag = r.numbers(e, p, "diag");
      if (diag.size() != 2) r.fail(p + ".diag", "expected two diagonal entries");
      d.diag0 = diag[0];
      d.diag1 = diag[1];
      d.scale = r.number(e, p, "scale", 1.0);
      entries.push_back(d);
    }
    return guarded(r, p, [&] { return make_rotated_diag(entries, exponent); });
  }
  r.fail(path, "expected one of preset, matrices or rotated_diag");
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte ? byte - 1 : 0), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": JSON syntax error: " + e.what());
  }
  const Reader r(text, source);
  if (!root.is_object()) r.fail("", "top level must be an object");
  r.check_keys(root, "", {"name", "shape", "scheme", "mesh", "anisotropy", "output", "converge"});

  ExperimentSpec spec;
  spec.name = r.string(root, "", "name", std::nullopt);

  const json& shape = r.section(root, "", "shape", true);
  r.check_keys(shape, "shape",
               {"type", "radius", "inner_radius", "outer_radius", "length", "width", "scale", "vertices"});
  spec.shape.kind = guarded(r, "shape.type", [&] { return parse_shape_kind(r.string(shape, "shape", "type", std::nullopt)); });
  spec.shape.radius = r.number(shape, "shape", "radius", spec.shape.radius);
  spec.shape.inner_radius = r.number(shape, "shape", "inner_radius", spec.shape.inner_radius);
  spec.shape.outer_radius = r.number(shape, "shape", "outer_radius", spec.shape.outer_radius);
  spec.shape.length = r.number(shape, "shape", "length", spec.shape.length);
  spec.shape.width = r.number(shape, "shape", "width", spec.shape.width);
  spec.shape.scale = r.number(shape, "shape", "scale", spec.shape.scale);
  spec.shape.vertices = r.integer(shape, "shape", "vertices", std::nullopt);

  const json& scheme = r.section(root, "", "scheme", true);
  r.check_keys(scheme, "scheme", {"type", "integration", "dt", "T", "tol", "max_iters"});
  SchemeConfig& sc = spec.scheme;
  sc.scheme = guarded(r, "scheme.type", [&] { return parse_scheme(r.string(scheme, "scheme", "type", std::nullopt)); });
  sc.integration = guarded(r, "scheme.integration",
                           [&] { return parse_integration(r.string(scheme, "scheme", "integration", "lumped")); });
  sc.dt = r.number(scheme, "scheme", "dt", std::nullopt);
  sc.T = r.number(scheme, "scheme", "T", std::nullopt);
  sc.tol = r.number(scheme, "scheme", "tol", 1e-10);
  sc.max_iters = static_cast<int>(r.integer(scheme, "scheme", "max_iters", 100));

  const json& mesh = r.section(root, "", "mesh", true);
  r.check_keys(mesh, "mesh", {"H", "fine", "coarse"});
  sc.mesh.H = r.number(mesh, "mesh", "H", 4.0);
  sc.mesh.fine = static_cast<int>(r.integer(mesh, "mesh", "fine", std::nullopt));
  sc.mesh.coarse = static_cast<int>(r.integer(mesh, "mesh", "coarse", std::nullopt));

  if (root.contains("anisotropy")) sc.anisotropy = read_anisotropy(r, r.section(root, "", "anisotropy", true));

  const json& output = r.section(root, "", "output", true);
  r.check_keys(output, "output", {"directory", "snapshot_times", "snapshot_every"});
  spec.output.directory = r.string(output, "output", "directory", std::nullopt);
  spec.output.snapshot_times = r.numbers(output, "output", "snapshot_times");
  spec.output.snapshot_every = static_cast<int>(r.integer(output, "output", "snapshot_every", 0));
  if (spec.output.snapshot_every < 0) r.fail("output.snapshot_every", "must be non-negative");

  if (root.contains("converge")) {
    const json& c = r.section(root, "", "converge", true);
    r.check_keys(c, "converge", {"levels", "r1", "r2", "T"});
    spec.has_ladder = true;
    if (c.contains("levels")) {
      spec.ladder.levels.clear();
      for (double l : r.numbers(c, "converge", "levels")) {
        if (l != std::floor(l) || l < 0 || l > 4) r.fail("converge.levels", "levels must be integers in 0..4");
        spec.ladder.levels.push_back(static_cast<int>(l));
      }
    }
    spec.ladder.r1 = r.number(c, "converge", "r1", spec.ladder.r1);
    spec.ladder.r2 = r.number(c, "converge", "r2", spec.ladder.r2);
    spec.ladder.T = r.number(c, "converge", "T", spec.ladder.T);
    if (!(spec.ladder.r1 > 0 && spec.ladder.r1 < spec.ladder.r2)) r.fail("converge.r1", "need 0 < r1 < r2");
    if (!(spec.ladder.T > 0)) r.fail("converge.T", "must be positive");
  }

  guarded(r, "scheme", [&] {
    sc.validate();
    return 0;
  });
  guarded(r, "shape", [&] {
    make_curve(spec.shape, sc.mesh.H);
    return 0;
  });
  for (double t : spec.output.snapshot_times)
    if (t < 0 || t > sc.T) r.fail("output.snapshot_times", "snapshot times must lie in [0, T]");
  return spec;
}

ExperimentSpec load_experiment(const std::string& path_or_preset, const std::string& preset_dir) {
  namespace fs = std::filesystem;
  fs::path path(path_or_preset);
  if (!fs::exists(path)) {
    const fs::path preset = fs::path(preset_dir) / (path_or_preset + ".json");
    if (!fs::exists(preset)) throw ConfigError("no spec file or preset named '" + path_or_preset + "'");
    path = preset;
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read spec file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str(), path.string());
}

}  // namespace mstrack
