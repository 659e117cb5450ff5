#include <mstrack/bulk_mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace mstrack {

namespace {

double cross(const Vector2& a, const Vector2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vector2& p, const Vector2& a, const Vector2& b) {
  const Vector2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

bool inside_triangle(const Vector2& p, const std::array<Vector2, 3>& t) {
  const double d0 = cross(t[1] - t[0], p - t[0]);
  const double d1 = cross(t[2] - t[1], p - t[1]);
  const double d2 = cross(t[0] - t[2], p - t[2]);
  return d0 >= 0 && d1 >= 0 && d2 >= 0;
}

double segment_triangle_distance(const Vector2& a, const Vector2& b, const std::array<Vector2, 3>& t) {
  if (inside_triangle(a, t) || inside_triangle(b, t)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const Vector2& c = t[static_cast<std::size_t>(i)];
    const Vector2& e = t[static_cast<std::size_t>((i + 1) % 3)];
    if (segments_intersect<double>(a, b, c, e)) return 0.0;
    d = std::min({d, point_segment_distance(c, a, b), point_segment_distance(a, c, e),
                  point_segment_distance(b, c, e)});
  }
  return d;
}

/// Uniform bucket grid over [-H, H]^2 for the curve elements.
class SegmentGrid {
 public:
  SegmentGrid(const Curve& curve, double H, double cell, double reach) : curve_(curve), H_(H) {
    n_ = std::clamp(static_cast<int>(2 * H / cell), 1, 512);
    buckets_.assign(static_cast<std::size_t>(n_) * n_, {});
    for (Index j = 0; j < curve.num_elements(); ++j) {
      const auto [a, b] = curve.element(j);
      const Vector2 lo = curve.vertex(a).cwiseMin(curve.vertex(b)).array() - reach;
      const Vector2 hi = curve.vertex(a).cwiseMax(curve.vertex(b)).array() + reach;
      for (int iy = index(lo.y()); iy <= index(hi.y()); ++iy)
        for (int ix = index(lo.x()); ix <= index(hi.x()); ++ix)
          buckets_[static_cast<std::size_t>(iy * n_ + ix)].push_back(j);
    }
    stamp_.assign(static_cast<std::size_t>(curve.num_elements()), 0);
  }

  /// True if any curve element lies within `dist` of the triangle.
  bool near(const std::array<Vector2, 3>& t, double dist) {
    ++round_;
    Vector2 lo = t[0].cwiseMin(t[1]).cwiseMin(t[2]);
    Vector2 hi = t[0].cwiseMax(t[1]).cwiseMax(t[2]);
    for (int iy = index(lo.y()); iy <= index(hi.y()); ++iy) {
      for (int ix = index(lo.x()); ix <= index(hi.x()); ++ix) {
        for (Index j : buckets_[static_cast<std::size_t>(iy * n_ + ix)]) {
          auto& s = stamp_[static_cast<std::size_t>(j)];
          if (s == round_) continue;
          s = round_;
          const auto [a, b] = curve_.element(j);
          if (segment_triangle_distance(curve_.vertex(a), curve_.vertex(b), t) <= dist) return true;
        }
      }
    }
    return false;
  }

 private:
  int index(double x) const {
    return std::clamp(static_cast<int>(std::floor((x + H_) / (2 * H_) * n_)), 0, n_ - 1);
  }

  const Curve& curve_;
  double H_;
  int n_ = 1;
  std::vector<std::vector<Index>> buckets_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t round_ = 0;
};

/// Newest-vertex bisection forest. For a node (v0, v1, v2) the refinement
/// edge is v0 v1 and v2 is the newest vertex.
class Refiner {
 public:
  explicit Refiner(double H) : H_(H) {
    points_ = {Vector2(-H, -H), Vector2(H, -H), Vector2(H, H), Vector2(-H, H)};
    add_node({2, 0, 1}, 0);
    add_node({0, 2, 3}, 0);
  }

  template <class Marker>
  void refine(Marker&& needs_refinement) {
    for (;;) {
      std::vector<Index> marked;
      for (Index t = 0; t < static_cast<Index>(nodes_.size()); ++t)
        if (is_leaf(t) && needs_refinement(corners(t))) marked.push_back(t);
      if (marked.empty()) return;
      for (Index t : marked) bisect(t);
    }
  }

  BulkMesh finish(int grid_cells) const {
    std::vector<BulkMesh::Triangle> tris;
    std::vector<int> levels;
    std::vector<Index> stack = {1, 0};
    while (!stack.empty()) {
      const Index t = stack.back();
      stack.pop_back();
      const Node& n = nodes_[static_cast<std::size_t>(t)];
      if (n.child[0] < 0) {
        tris.push_back(n.v);
        levels.push_back(n.level);
      } else {
        stack.push_back(n.child[1]);
        stack.push_back(n.child[0]);
      }
    }
    Matrix2X v(2, static_cast<Index>(points_.size()));
    for (std::size_t a = 0; a < points_.size(); ++a) v.col(static_cast<Index>(a)) = points_[a];
    return BulkMesh(H_, std::move(v), std::move(tris), std::move(levels), grid_cells);
  }

 private:
  struct Node {
    BulkMesh::Triangle v;
    int level = 0;
    Index child[2] = {-1, -1};
  };

  static std::uint64_t key(Index a, Index b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  bool is_leaf(Index t) const { return nodes_[static_cast<std::size_t>(t)].child[0] < 0; }

  std::array<Vector2, 3> corners(Index t) const {
    const auto& v = nodes_[static_cast<std::size_t>(t)].v;
    return {points_[static_cast<std::size_t>(v[0])], points_[static_cast<std::size_t>(v[1])],
            points_[static_cast<std::size_t>(v[2])]};
  }

  Index add_node(const BulkMesh::Triangle& v, int level) {
    const Index id = static_cast<Index>(nodes_.size());
    nodes_.push_back({v, level, {-1, -1}});
    for (int i = 0; i < 3; ++i) {
      auto& slots = edges_.try_emplace(key(v[i], v[(i + 1) % 3]), std::array<Index, 2>{-1, -1}).first->second;
      (slots[0] < 0 ? slots[0] : slots[1]) = id;
    }
    return id;
  }

  void detach(Index t) {
    const auto v = nodes_[static_cast<std::size_t>(t)].v;
    for (int i = 0; i < 3; ++i) {
      auto it = edges_.find(key(v[i], v[(i + 1) % 3]));
      auto& slots = it->second;
      if (slots[0] == t) slots[0] = slots[1];
      slots[1] = -1;
      if (slots[0] < 0) edges_.erase(it);
    }
  }

  Index neighbor(Index t, Index a, Index b) const {
    const auto& slots = edges_.at(key(a, b));
    return slots[0] == t ? slots[1] : slots[0];
  }

  void split(Index t, Index m) {
    const Node n = nodes_[static_cast<std::size_t>(t)];
    detach(t);
    const Index c0 = add_node({n.v[2], n.v[0], m}, n.level + 1);
    const Index c1 = add_node({n.v[1], n.v[2], m}, n.level + 1);
    nodes_[static_cast<std::size_t>(t)].child[0] = c0;
    nodes_[static_cast<std::size_t>(t)].child[1] = c1;
  }

  Index midpoint(Index a, Index b) {
    points_.push_back(0.5 * (points_[static_cast<std::size_t>(a)] + points_[static_cast<std::size_t>(b)]));
    return static_cast<Index>(points_.size()) - 1;
  }

  void bisect(Index t) {
    while (is_leaf(t)) {
      const auto v = nodes_[static_cast<std::size_t>(t)].v;
      const Index n = neighbor(t, v[0], v[1]);
      if (n < 0) {
        split(t, midpoint(v[0], v[1]));
        return;
      }
      const auto& w = nodes_[static_cast<std::size_t>(n)].v;
      if (key(w[0], w[1]) == key(v[0], v[1])) {
        const Index m = midpoint(v[0], v[1]);
        split(t, m);
        split(n, m);
        return;
      }
      bisect(n);
    }
  }

  double H_;
  std::vector<Vector2> points_;
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::array<Index, 2>> edges_;
};

double max_edge(const std::array<Vector2, 3>& t) {
  return std::max({(t[1] - t[0]).norm(), (t[2] - t[1]).norm(), (t[0] - t[2]).norm()});
}

// Side of the square an isosceles right triangle halves.
double element_size(const std::array<Vector2, 3>& t) { return max_edge(t) / std::sqrt(2.0); }

int grid_cells_for(double H, double cell) { return std::clamp(static_cast<int>(2 * H / cell), 1, 512); }

}  // namespace

BulkMesh::BulkMesh(double H, Matrix2X vertices, std::vector<Triangle> triangles, std::vector<int> levels,
                   int grid_cells_per_side)
    : H_(H),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      levels_(std::move(levels)),
      cells_(std::max(1, grid_cells_per_side)) {
  if (levels_.size() != triangles_.size()) levels_.assign(triangles_.size(), 0);
  const std::size_t ncell = static_cast<std::size_t>(cells_) * static_cast<std::size_t>(cells_);
  std::vector<Index> count(ncell + 1, 0);
  auto for_cells = [&](Index t, auto&& f) {
    const auto& tri = triangle(t);
    Vector2 lo = vertex(tri[0]), hi = vertex(tri[0]);
    for (int i = 1; i < 3; ++i) {
      lo = lo.cwiseMin(Vector2(vertex(tri[i])));
      hi = hi.cwiseMax(Vector2(vertex(tri[i])));
    }
    for (int iy = cell_index(lo.y()); iy <= cell_index(hi.y()); ++iy)
      for (int ix = cell_index(lo.x()); ix <= cell_index(hi.x()); ++ix)
        f(static_cast<std::size_t>(iy) * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(ix));
  };
  for (Index t = 0; t < num_triangles(); ++t) for_cells(t, [&](std::size_t c) { ++count[c + 1]; });
  for (std::size_t c = 0; c < ncell; ++c) count[c + 1] += count[c];
  cell_start_ = count;
  cell_items_.assign(static_cast<std::size_t>(count[ncell]), 0);
  for (Index t = 0; t < num_triangles(); ++t)
    for_cells(t, [&](std::size_t c) { cell_items_[static_cast<std::size_t>(count[c]++)] = t; });
}

int BulkMesh::cell_index(double x) const {
  return std::clamp(static_cast<int>(std::floor((x + H_) / (2 * H_) * cells_)), 0, cells_ - 1);
}

double BulkMesh::area(Index t) const {
  const auto& tri = triangle(t);
  return 0.5 * cross(vertex(tri[1]) - vertex(tri[0]), vertex(tri[2]) - vertex(tri[0]));
}

double BulkMesh::diameter(Index t) const {
  const auto& tri = triangle(t);
  return max_edge({vertex(tri[0]), vertex(tri[1]), vertex(tri[2])});
}

double BulkMesh::max_diameter() const {
  double d = 0;
  for (Index t = 0; t < num_triangles(); ++t) d = std::max(d, diameter(t));
  return d;
}

Eigen::Vector3d BulkMesh::barycentric(Index t, const Vector2& p) const {
  const auto& tri = triangle(t);
  const Vector2 a = vertex(tri[0]);
  const Vector2 ab = Vector2(vertex(tri[1])) - a;
  const Vector2 ac = Vector2(vertex(tri[2])) - a;
  const Vector2 ap = p - a;
  const double det = cross(ab, ac);
  const double l1 = cross(ap, ac) / det;
  const double l2 = cross(ab, ap) / det;
  return {1 - l1 - l2, l1, l2};
}

BarycentricLocation BulkMesh::locate(const Vector2& p) const {
  const double slack = 1e-12 * H_;
  if (!(std::abs(p.x()) <= H_ + slack && std::abs(p.y()) <= H_ + slack)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "point (%.17g, %.17g) lies outside the domain", p.x(), p.y());
    throw LocationError(buf);
  }
  const std::size_t c = static_cast<std::size_t>(cell_index(p.y())) * static_cast<std::size_t>(cells_) +
                        static_cast<std::size_t>(cell_index(p.x()));
  BarycentricLocation best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (Index i = cell_start_[c]; i < cell_start_[c + 1]; ++i) {
    const Index t = cell_items_[static_cast<std::size_t>(i)];
    const Eigen::Vector3d l = barycentric(t, p);
    const double m = l.minCoeff();
    if (m >= -1e-12) {
      best = {t, l};
      break;
    }
    if (m > best_min) {
      best_min = m;
      best = {t, l};
    }
  }
  if (best.triangle < 0) throw LocationError("point location found no candidate triangle");
  best.lambda = best.lambda.cwiseMax(0.0);
  best.lambda /= best.lambda.sum();
  return best;
}

std::vector<Index> BulkMesh::candidates(const Vector2& lo, const Vector2& hi) const {
  std::vector<Index> out;
  for (int iy = cell_index(lo.y()); iy <= cell_index(hi.y()); ++iy) {
    for (int ix = cell_index(lo.x()); ix <= cell_index(hi.x()); ++ix) {
      const std::size_t c = static_cast<std::size_t>(iy) * static_cast<std::size_t>(cells_) +
                            static_cast<std::size_t>(ix);
      out.insert(out.end(), cell_items_.begin() + cell_start_[c], cell_items_.begin() + cell_start_[c + 1]);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BulkMesh build_adaptive(const Curve& curve, const MeshParams& params) {
  if (params.fine < 1 || params.coarse < 1 || params.coarse > params.fine)
    throw ConfigError("mesh parameters need 1 <= N_c <= N_f");
  if (!(params.H > 0)) throw ConfigError("mesh parameter H must be positive");
  const double H = params.H;
  for (Index k = 0; k < curve.num_vertices(); ++k)
    if (!(curve.vertex(k).cwiseAbs().maxCoeff() < H))
      throw ConfigError("curve touches or leaves the domain boundary");

  const double hf = params.fine_size();
  const double fine_bound = hf * (1 + params.slack);
  const double coarse_bound = params.coarse_size() * (1 + params.slack);
  SegmentGrid grid(curve, H, 2 * hf, hf);
  Refiner refiner(H);
  refiner.refine([&](const std::array<Vector2, 3>& t) {
    const double d = element_size(t);
    if (d > coarse_bound) return true;
    if (d <= fine_bound) return false;
    return grid.near(t, hf);
  });
  return refiner.finish(grid_cells_for(H, 2 * hf));
}

BulkMesh build_uniform(double H, int n, double slack) {
  if (n < 1 || !(H > 0)) throw ConfigError("uniform mesh needs n >= 1 and H > 0");
  const double h = 2 * H / n;
  const double bound = h * (1 + slack);
  Refiner refiner(H);
  refiner.refine([&](const std::array<Vector2, 3>& t) { return element_size(t) > bound; });
  return refiner.finish(grid_cells_for(H, 2 * h));
}

Eigen::Matrix3d local_stiffness(const Vector2& a, const Vector2& b, const Vector2& c) {
  const std::array<Vector2, 3> p = {a, b, c};
  const double area2 = cross(b - a, c - a);
  std::array<Vector2, 3> grad;
  for (int i = 0; i < 3; ++i) {
    const Vector2 e = p[static_cast<std::size_t>((i + 2) % 3)] - p[static_cast<std::size_t>((i + 1) % 3)];
    grad[static_cast<std::size_t>(i)] = perp(e) / area2;
  }
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      k(i, j) = 0.5 * area2 * grad[static_cast<std::size_t>(i)].dot(grad[static_cast<std::size_t>(j)]);
  return k;
}

SparseMatrix stiffness_matrix(const BulkMesh& mesh) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(9 * mesh.num_triangles()));
  for (Index e = 0; e < mesh.num_triangles(); ++e) {
    const auto& tri = mesh.triangle(e);
    const Eigen::Matrix3d k = local_stiffness(mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.emplace_back(tri[i], tri[j], k(i, j));
  }
  SparseMatrix a(mesh.num_vertices(), mesh.num_vertices());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

double evaluate(const BulkMesh& mesh, const VectorX& field, const Vector2& p) {
  const BarycentricLocation loc = mesh.locate(p);
  const auto& tri = mesh.triangle(loc.triangle);
  return loc.lambda[0] * field[tri[0]] + loc.lambda[1] * field[tri[1]] + loc.lambda[2] * field[tri[2]];
}

ConformityReport audit_conformity(const BulkMesh& mesh) {
  ConformityReport report;
  std::unordered_map<std::uint64_t, int> count;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.area(t) > 0)) ++report.violations;
    const auto& tri = mesh.triangle(t);
    for (int i = 0; i < 3; ++i) {
      Index a = tri[i], b = tri[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[(static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b)];
    }
  }
  const double H = mesh.H();
  auto on_boundary = [&](Index a, Index b) {
    const Vector2 p = mesh.vertex(a), q = mesh.vertex(b);
    return (std::abs(p.x()) == H && p.x() == q.x()) || (std::abs(p.y()) == H && p.y() == q.y());
  };
  for (const auto& [k, c] : count) {
    const Index a = static_cast<Index>(k >> 32);
    const Index b = static_cast<Index>(k & 0xffffffffu);
    const bool boundary = on_boundary(a, b);
    if (boundary) {
      ++report.boundary_edges;
      if (c != 1) ++report.violations;
    } else {
      ++report.interior_edges;
      if (c != 2) ++report.violations;
    }
  }
  const Index edges = report.interior_edges + report.boundary_edges;
  report.euler_ok = mesh.num_vertices() - edges + mesh.num_triangles() == 1;
  return report;
}

void write_mesh(std::ostream& out, const BulkMesh& mesh) {
  char buf[96];
  out << "# vertices " << mesh.num_vertices() << '\n';
  for (Index a = 0; a < mesh.num_vertices(); ++a) {
    std::snprintf(buf, sizeof buf, "%.17e %.17e\n", mesh.vertex(a).x(), mesh.vertex(a).y());
    out << buf;
  }
  out << "# triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace mstrack
