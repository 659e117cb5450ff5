#pragma once

#include <mstrack/curve.hpp>

#include <array>
#include <iosfwd>
#include <vector>

namespace mstrack {

struct MeshParams {
  double H = 4.0;        // domain (-H, H)^2
  int fine = 128;        // N_f, h_f = 2H / N_f
  int coarse = 1;        // N_c, h_c = 2H / N_c
  double slack = 0.05;   // accepted relative excess over a target diameter

  double fine_size() const { return 2 * H / fine; }
  double coarse_size() const { return 2 * H / coarse; }
};

struct BarycentricLocation {
  Index triangle = -1;
  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
};

/// Conforming triangulation of (-H, H)^2 with P1 nodal values. Triangles are
/// positively oriented; a uniform background grid accelerates point location.
class BulkMesh {
 public:
  using Triangle = std::array<Index, 3>;

  BulkMesh() = default;
  BulkMesh(double H, Matrix2X vertices, std::vector<Triangle> triangles, std::vector<int> levels,
           int grid_cells_per_side);

  double H() const { return H_; }
  Index num_vertices() const { return vertices_.cols(); }
  Index num_triangles() const { return static_cast<Index>(triangles_.size()); }
  const Matrix2X& vertices() const { return vertices_; }
  auto vertex(Index a) const { return vertices_.col(a); }
  const Triangle& triangle(Index t) const { return triangles_[static_cast<std::size_t>(t)]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  int level(Index t) const { return levels_[static_cast<std::size_t>(t)]; }

  double area(Index t) const;
  double diameter(Index t) const;
  double max_diameter() const;

  /// Unclamped barycentric coordinates of p with respect to triangle t.
  Eigen::Vector3d barycentric(Index t, const Vector2& p) const;

  /// Containing triangle (lowest id on shared edges and vertices) and its
  /// barycentric coordinates, clamped to [0, 1] and summing to one.
  BarycentricLocation locate(const Vector2& p) const;

  /// Ascending ids of triangles registered in grid cells overlapping the box.
  std::vector<Index> candidates(const Vector2& lo, const Vector2& hi) const;

 private:
  int cell_index(double coordinate) const;

  double H_ = 0;
  Matrix2X vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> levels_;
  int cells_ = 1;
  std::vector<Index> cell_start_;
  std::vector<Index> cell_items_;
};

/// Newest-vertex bisection from the two-triangle macro mesh of (-H, H)^2.
/// All elements are isosceles right triangles; their size is the leg length
/// diam / sqrt(2), i.e. the side of the square they halve. Triangles within
/// distance h_f of the curve (or cut by it) are refined until their size is
/// at most h_f (1 + slack), all others until h_c (1 + slack).
BulkMesh build_adaptive(const Curve& curve, const MeshParams& params);

/// Uniform mesh of n x n squares, each split into two triangles.
BulkMesh build_uniform(double H, int n, double slack = 0.05);

/// Element stiffness of the P1 Laplacian on the triangle (a, b, c).
Eigen::Matrix3d local_stiffness(const Vector2& a, const Vector2& b, const Vector2& c);

/// Global P1 stiffness matrix (grad phi_a, grad phi_b).
SparseMatrix stiffness_matrix(const BulkMesh& mesh);

/// Nodal interpolant I f.
template <class F>
VectorX interpolate(const BulkMesh& mesh, F&& f) {
  VectorX out(mesh.num_vertices());
  for (Index a = 0; a < mesh.num_vertices(); ++a) out[a] = f(Vector2(mesh.vertex(a)));
  return out;
}

/// Value of the P1 function with nodal values `field` at p.
double evaluate(const BulkMesh& mesh, const VectorX& field, const Vector2& p);

struct ConformityReport {
  Index violations = 0;   // interior edges not shared by exactly two triangles, etc.
  Index interior_edges = 0;
  Index boundary_edges = 0;
  bool euler_ok = false;  // V - E + F == 1 for the simply connected square
  bool ok() const { return violations == 0 && euler_ok; }
};

ConformityReport audit_conformity(const BulkMesh& mesh);

/// Debug dump: vertex table followed by `v1 v2 v3` rows.
void write_mesh(std::ostream& out, const BulkMesh& mesh);

}  // namespace mstrack
