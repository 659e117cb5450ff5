#include <mstrack/coupling.hpp>

#include <algorithm>
#include <cmath>

namespace mstrack {

namespace {

double cross(const Vector2& a, const Vector2& b) { return a.x() * b.y() - a.y() * b.x(); }

constexpr double kBreakTol = 1e-14;

/// Parameter interval of a + s d, s in [0, 1], inside the closed triangle;
/// empty when lo > hi.
std::pair<double, double> triangle_interval(const BulkMesh& mesh, Index t, const Vector2& a,
                                            const Vector2& d) {
  const auto& tri = mesh.triangle(t);
  double lo = 0, hi = 1;
  for (int i = 0; i < 3; ++i) {
    const Vector2 p = mesh.vertex(tri[i]);
    const Vector2 e = Vector2(mesh.vertex(tri[(i + 1) % 3])) - p;
    const double scale = e.norm() * std::max(d.norm(), (a - p).norm());
    const double c0 = cross(e, a - p);
    const double c1 = cross(e, d);
    // c0 + s c1 >= 0 on the inside.
    if (std::abs(c1) <= kBreakTol * scale) {
      if (c0 < -kBreakTol * scale) return {1, 0};
      continue;
    }
    const double s = -c0 / c1;
    if (c1 > 0)
      lo = std::max(lo, s);
    else
      hi = std::min(hi, s);
  }
  return {lo, hi};
}

}  // namespace

std::string to_string(Integration i) { return i == Integration::lumped ? "lumped" : "true"; }

Integration parse_integration(const std::string& name) {
  if (name == "lumped") return Integration::lumped;
  if (name == "true" || name == "exact") return Integration::exact;
  throw ConfigError("unknown integration variant '" + name + "' (expected lumped or true)");
}

std::vector<ClipPiece> clip_curve_to_mesh(const Curve& curve, const BulkMesh& mesh) {
  std::vector<ClipPiece> pieces;
  pieces.reserve(static_cast<std::size_t>(2 * curve.num_elements()));
  std::vector<double> breaks;
  for (Index j = 0; j < curve.num_elements(); ++j) {
    const auto [ka, kb] = curve.element(j);
    const Vector2 a = curve.vertex(ka);
    const Vector2 b = curve.vertex(kb);
    const Vector2 d = b - a;
    breaks.assign({0.0, 1.0});
    for (Index t : mesh.candidates(a.cwiseMin(b), a.cwiseMax(b))) {
      const auto [lo, hi] = triangle_interval(mesh, t, a, d);
      if (lo > hi) continue;
      if (lo > 0 && lo < 1) breaks.push_back(lo);
      if (hi > 0 && hi < 1) breaks.push_back(hi);
    }
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> merged = {0.0};
    for (double s : breaks)
      if (s - merged.back() > kBreakTol) merged.push_back(s);
    if (1.0 - merged.back() <= kBreakTol) merged.back() = 1.0;
    else merged.push_back(1.0);
    if (merged.size() < 2) merged = {0.0, 1.0};

    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
      const double s0 = merged[i], s1 = merged[i + 1];
      const Index t = mesh.locate(a + 0.5 * (s0 + s1) * d).triangle;
      if (!pieces.empty() && pieces.back().element == j && pieces.back().triangle == t)
        pieces.back().s1 = s1;
      else
        pieces.push_back({j, t, s0, s1});
    }
  }
  return pieces;
}

CouplingMatrices assemble_coupling(const Curve& curve, const BulkMesh& mesh, Integration variant) {
  CouplingMatrices out;
  out.mass = lumped_weights(curve);
  std::vector<Triplet> t;
  if (variant == Integration::lumped) {
    t.reserve(static_cast<std::size_t>(3 * curve.num_vertices()));
    for (Index k = 0; k < curve.num_vertices(); ++k) {
      const BarycentricLocation loc = mesh.locate(curve.vertex(k));
      const auto& tri = mesh.triangle(loc.triangle);
      for (int i = 0; i < 3; ++i)
        if (loc.lambda[i] != 0) t.emplace_back(tri[i], k, out.mass[k] * loc.lambda[i]);
    }
  } else {
    const double g = 0.5 / std::sqrt(3.0);
    for (const ClipPiece& p : clip_curve_to_mesh(curve, mesh)) {
      const auto [ka, kb] = curve.element(p.element);
      const Vector2 a = curve.vertex(ka);
      const Vector2 d = Vector2(curve.vertex(kb)) - a;
      const double half = 0.5 * (p.s1 - p.s0) * d.norm();
      const auto& tri = mesh.triangle(p.triangle);
      for (double xi : {0.5 - g, 0.5 + g}) {
        const double s = p.s0 + xi * (p.s1 - p.s0);
        const Eigen::Vector3d lambda = mesh.barycentric(p.triangle, a + s * d);
        for (int i = 0; i < 3; ++i) {
          t.emplace_back(tri[i], ka, half * lambda[i] * (1 - s));
          t.emplace_back(tri[i], kb, half * lambda[i] * s);
        }
      }
    }
  }
  out.N.resize(mesh.num_vertices(), curve.num_vertices());
  out.N.setFromTriplets(t.begin(), t.end());
  return out;
}

SurfaceOperators assemble_surface_operators(const Curve& curve) {
  SurfaceOperators out;
  out.mass = lumped_weights(curve);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(4 * curve.num_elements()));
  for (Index j = 0; j < curve.num_elements(); ++j) {
    const auto [a, b] = curve.element(j);
    const double w = 1.0 / curve.length(j);
    t.emplace_back(a, a, w);
    t.emplace_back(b, b, w);
    t.emplace_back(a, b, -w);
    t.emplace_back(b, a, -w);
  }
  out.stiffness.resize(curve.num_vertices(), curve.num_vertices());
  out.stiffness.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix kron2(const SparseMatrix& a) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * a.nonZeros()));
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      t.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      t.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  }
  SparseMatrix out(2 * a.rows(), 2 * a.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace mstrack
