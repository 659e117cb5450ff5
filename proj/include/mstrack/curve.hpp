#pragma once

#include <mstrack/types.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace mstrack {

using Index = Eigen::Index;

/// Closed polygonal curve made of one or more vertex loops.
///
/// Vertices of all loops are stored in one 2xK array; loop l owns the
/// contiguous index range [loop_begin(l), loop_end(l)). Element j joins
/// vertex j to next(j), so K == J. The vertex order of every loop is such
/// that the anticlockwise rotation of an element's edge vector is the outer
/// normal of the enclosed region: boundary loops of the region run clockwise,
/// holes run anticlockwise. Input loops with the wrong sense are reversed.
template <class Scalar>
class BasicCurve {
 public:
  using Point = Vec2<Scalar>;
  using Positions = Points2<Scalar>;

  BasicCurve() = default;

  explicit BasicCurve(const std::vector<Positions>& loops) {
    if (loops.empty()) throw GeometryError("curve needs at least one loop");
    Index total = 0;
    for (const auto& loop : loops) {
      if (loop.cols() < 3) throw GeometryError("curve loop needs at least 3 vertices");
      total += loop.cols();
    }
    positions_.resize(2, total);
    offsets_.assign(1, 0);
    for (const auto& loop : loops) {
      positions_.middleCols(offsets_.back(), loop.cols()) = loop;
      offsets_.push_back(offsets_.back() + loop.cols());
    }
    for (Index j = 0; j < total; ++j) {
      if (!((vertex(next(j)) - vertex(j)).squaredNorm() > Scalar(0)))
        throw GeometryError("curve has a zero-length element");
    }
    orient();
  }

  /// Same connectivity, new vertex positions. No reorientation takes place.
  BasicCurve with_positions(Positions positions) const {
    if (positions.cols() != positions_.cols())
      throw GeometryError("with_positions: vertex count mismatch");
    BasicCurve out;
    out.positions_ = std::move(positions);
    out.offsets_ = offsets_;
    return out;
  }

  Index num_vertices() const { return positions_.cols(); }
  Index num_elements() const { return positions_.cols(); }
  Index num_loops() const { return static_cast<Index>(offsets_.size()) - 1; }
  Index loop_begin(Index l) const { return offsets_[l]; }
  Index loop_end(Index l) const { return offsets_[l + 1]; }
  Index loop_size(Index l) const { return offsets_[l + 1] - offsets_[l]; }

  Index loop_of(Index k) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), k);
    return static_cast<Index>(it - offsets_.begin()) - 1;
  }
  Index next(Index k) const {
    const Index l = loop_of(k);
    return k + 1 == offsets_[l + 1] ? offsets_[l] : k + 1;
  }
  Index prev(Index k) const {
    const Index l = loop_of(k);
    return k == offsets_[l] ? offsets_[l + 1] - 1 : k - 1;
  }

  const Positions& positions() const { return positions_; }
  auto vertex(Index k) const { return positions_.col(k); }

  /// Vertex indices (q_{j,1}, q_{j,2}) of element j.
  std::pair<Index, Index> element(Index j) const { return {j, next(j)}; }
  Point edge(Index j) const { return vertex(next(j)) - vertex(j); }
  Scalar length(Index j) const { return edge(j).norm(); }

  Positions loop(Index l) const { return positions_.middleCols(loop_begin(l), loop_size(l)); }

  bool same_connectivity(const BasicCurve& other) const { return offsets_ == other.offsets_; }

 private:
  Scalar loop_shoelace(Index l) const {
    Scalar twice = 0;
    for (Index k = loop_begin(l); k < loop_end(l); ++k) {
      const auto a = vertex(k);
      const auto b = vertex(next(k));
      twice += a.x() * b.y() - a.y() * b.x();
    }
    return twice / 2;
  }

  bool loop_contains(Index l, const Point& p) const {
    bool inside = false;
    for (Index k = loop_begin(l); k < loop_end(l); ++k) {
      const Point a = vertex(k);
      const Point b = vertex(next(k));
      if ((a.y() > p.y()) != (b.y() > p.y())) {
        const Scalar x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
        if (p.x() < x) inside = !inside;
      }
    }
    return inside;
  }

  // Nesting depth decides the sense: depth 0 boundaries run clockwise (negative
  // shoelace area), holes anticlockwise.
  void orient() {
    for (Index l = 0; l < num_loops(); ++l) {
      const Scalar area = loop_shoelace(l);
      if (area == Scalar(0)) throw GeometryError("curve loop encloses zero area");
      int depth = 0;
      const Point probe = vertex(loop_begin(l));
      for (Index o = 0; o < num_loops(); ++o)
        if (o != l && loop_contains(o, probe)) ++depth;
      const bool want_negative = depth % 2 == 0;
      if ((area < 0) != want_negative) {
        auto block = positions_.middleCols(loop_begin(l) + 1, loop_size(l) - 1);
        block.rowwise().reverseInPlace();
      }
    }
  }

  Positions positions_;
  std::vector<Index> offsets_;
};

using Curve = BasicCurve<double>;

// ---------------------------------------------------------------------------
// Element quantities

template <class Scalar>
Vec2<Scalar> element_normal(const BasicCurve<Scalar>& curve, Index j) {
  const Vec2<Scalar> e = curve.edge(j);
  const Scalar len = e.norm();
  if (!(len > Scalar(0))) throw GeometryError("degenerate curve element");
  return perp(e) / len;
}

template <class Scalar>
Points2<Scalar> element_normals(const BasicCurve<Scalar>& curve) {
  Points2<Scalar> n(2, curve.num_elements());
  for (Index j = 0; j < curve.num_elements(); ++j) n.col(j) = element_normal(curve, j);
  return n;
}

template <class Scalar>
VecX<Scalar> element_lengths(const BasicCurve<Scalar>& curve) {
  VecX<Scalar> h(curve.num_elements());
  for (Index j = 0; j < curve.num_elements(); ++j) h[j] = curve.length(j);
  return h;
}

template <class Scalar>
Scalar curve_length(const BasicCurve<Scalar>& curve) {
  return element_lengths(curve).sum();
}

/// Lumped vertex weights m_k = (|sigma_-| + |sigma_+|) / 2.
template <class Scalar>
VecX<Scalar> lumped_weights(const BasicCurve<Scalar>& curve) {
  VecX<Scalar> m = VecX<Scalar>::Zero(curve.num_vertices());
  for (Index j = 0; j < curve.num_elements(); ++j) {
    const auto [a, b] = curve.element(j);
    const Scalar half = curve.length(j) / 2;
    m[a] += half;
    m[b] += half;
  }
  return m;
}

/// Mass-lumped integral sum_j |sigma_j|/2 (w(j, q_{j,1}) + w(j, q_{j,2})), where
/// w(j, k) is the one-sided limit from element j of the integrand at vertex k.
template <class Scalar, class OneSided>
Scalar lumped_integral(const BasicCurve<Scalar>& curve, OneSided&& w) {
  Scalar sum = 0;
  for (Index j = 0; j < curve.num_elements(); ++j) {
    const auto [a, b] = curve.element(j);
    sum += curve.length(j) / 2 * (w(j, a) + w(j, b));
  }
  return sum;
}

template <class Scalar>
Scalar lumped_inner_product(const BasicCurve<Scalar>& curve, const VecX<Scalar>& u,
                            const VecX<Scalar>& v) {
  return lumped_integral(curve, [&](Index, Index k) { return u[k] * v[k]; });
}

template <class Scalar>
Scalar lumped_inner_product(const BasicCurve<Scalar>& curve, const Points2<Scalar>& u,
                            const Points2<Scalar>& v) {
  return lumped_integral(curve, [&](Index, Index k) { return u.col(k).dot(v.col(k)); });
}

// Lumped projection of an element-wise constant vector field onto vertex
// fields; in d = 2 the mass matrix is diagonal and the solution is the
// length-weighted mean of the two adjacent element values.
template <class Scalar>
Points2<Scalar> project_to_vertices(const BasicCurve<Scalar>& curve, const VecX<Scalar>& weights,
                                    const Points2<Scalar>& element_values) {
  Points2<Scalar> out(2, curve.num_vertices());
  for (Index k = 0; k < curve.num_vertices(); ++k) {
    const Index jm = curve.prev(k);
    out.col(k) = (weights[jm] * element_values.col(jm) + weights[k] * element_values.col(k)) /
                 (weights[jm] + weights[k]);
  }
  return out;
}

/// Vertex normal omega^h: lumped L2 projection of the element normals.
template <class Scalar>
Points2<Scalar> vertex_normal(const BasicCurve<Scalar>& curve) {
  return project_to_vertices(curve, element_lengths(curve), element_normals(curve));
}

// ---------------------------------------------------------------------------
// Averaged normals of the linear interpolation between two curves

/// nu^{m+1/2} on element j: time average of |sigma(t)| nu(t) over the
/// straight-line interpolation, divided by the old element length.
template <class Scalar>
Vec2<Scalar> averaged_element_normal(const BasicCurve<Scalar>& old_curve,
                                     const BasicCurve<Scalar>& new_curve, Index j) {
  const Vec2<Scalar> e_old = old_curve.edge(j);
  const Scalar len = e_old.norm();
  if (!(len > Scalar(0))) throw GeometryError("degenerate old curve element");
  const Vec2<Scalar> mean = Scalar(0.5) * (e_old + new_curve.edge(j));
  return perp(mean) / len;
}

template <class Scalar>
Points2<Scalar> averaged_element_normals(const BasicCurve<Scalar>& old_curve,
                                         const BasicCurve<Scalar>& new_curve) {
  if (!old_curve.same_connectivity(new_curve))
    throw GeometryError("averaged normals need matching connectivity");
  Points2<Scalar> n(2, old_curve.num_elements());
  for (Index j = 0; j < old_curve.num_elements(); ++j)
    n.col(j) = averaged_element_normal(old_curve, new_curve, j);
  return n;
}

template <class Scalar>
Points2<Scalar> averaged_vertex_normal(const BasicCurve<Scalar>& old_curve,
                                       const BasicCurve<Scalar>& new_curve) {
  return project_to_vertices(old_curve, element_lengths(old_curve),
                             averaged_element_normals(old_curve, new_curve));
}

/// Surface triangle kernel: averaged normal of a linearly interpolated
/// triangle, scaled by the old triangle's doubled area.
template <class Scalar>
Vec3<Scalar> averaged_element_normal_3d(const std::array<Vec3<Scalar>, 3>& old_tri,
                                        const std::array<Vec3<Scalar>, 3>& new_tri) {
  const Vec3<Scalar> a0 = old_tri[1] - old_tri[0];
  const Vec3<Scalar> b0 = old_tri[2] - old_tri[0];
  const Vec3<Scalar> a1 = new_tri[1] - new_tri[0];
  const Vec3<Scalar> b1 = new_tri[2] - new_tri[0];
  const Scalar scale = a0.cross(b0).norm();
  if (!(scale > Scalar(0))) throw GeometryError("degenerate old triangle");
  return (a0.cross(b0) + a1.cross(b1) + (a0 + a1).cross(b0 + b1)) / (6 * scale);
}

/// Area of a surface triangle.
template <class Scalar>
Scalar triangle_measure(const std::array<Vec3<Scalar>, 3>& tri) {
  return (tri[1] - tri[0]).cross(tri[2] - tri[0]).norm() / 2;
}

// ---------------------------------------------------------------------------
// Volume

/// Enclosed area (1/2) int id . nu; the integrand is constant per element.
template <class Scalar>
Scalar enclosed_volume(const BasicCurve<Scalar>& curve) {
  Scalar sum = 0;
  for (Index j = 0; j < curve.num_elements(); ++j) {
    const auto [a, b] = curve.element(j);
    const Vec2<Scalar> mid = Scalar(0.5) * (curve.vertex(a) + curve.vertex(b));
    sum += mid.dot(perp(curve.edge(j)));
  }
  return sum / 2;
}

/// <X - id, nu^{m+1/2}> on the old curve with exact integration of the
/// element-wise linear integrand.
template <class Scalar>
Scalar averaged_normal_pairing(const BasicCurve<Scalar>& old_curve,
                               const BasicCurve<Scalar>& new_curve) {
  const Points2<Scalar> nu = averaged_element_normals(old_curve, new_curve);
  Scalar sum = 0;
  for (Index j = 0; j < old_curve.num_elements(); ++j) {
    const auto [a, b] = old_curve.element(j);
    const Vec2<Scalar> da = new_curve.vertex(a) - old_curve.vertex(a);
    const Vec2<Scalar> db = new_curve.vertex(b) - old_curve.vertex(b);
    sum += old_curve.length(j) * Scalar(0.5) * (da + db).dot(nu.col(j));
  }
  return sum;
}

template <class Scalar>
struct VolumeIdentity {
  Scalar lhs;  // vol(new) - vol(old)
  Scalar rhs;  // <X - id, nu^{m+1/2}>
};

template <class Scalar>
VolumeIdentity<Scalar> volume_difference_identity(const BasicCurve<Scalar>& old_curve,
                                                  const BasicCurve<Scalar>& new_curve) {
  return {enclosed_volume(new_curve) - enclosed_volume(old_curve),
          averaged_normal_pairing(old_curve, new_curve)};
}

// ---------------------------------------------------------------------------
// Mesh quality

template <class Scalar>
Scalar equidistribution_ratio(const BasicCurve<Scalar>& curve) {
  const VecX<Scalar> h = element_lengths(curve);
  return h.maxCoeff() / h.minCoeff();
}

/// (A_Gamma X)_k = sum over adjacent elements of (X_k - X_other) / |sigma|.
template <class Scalar>
Points2<Scalar> surface_stiffness_apply(const BasicCurve<Scalar>& curve, const Points2<Scalar>& x) {
  Points2<Scalar> out = Points2<Scalar>::Zero(2, curve.num_vertices());
  for (Index j = 0; j < curve.num_elements(); ++j) {
    const auto [a, b] = curve.element(j);
    const Vec2<Scalar> flux = (x.col(b) - x.col(a)) / curve.length(j);
    out.col(a) -= flux;
    out.col(b) += flux;
  }
  return out;
}

/// Max-norm over basis test fields of <kappa nu^h, eta>^h + <grad_s id, grad_s eta>.
template <class Scalar>
Scalar conformality_residual(const BasicCurve<Scalar>& curve, const VecX<Scalar>& kappa) {
  const VecX<Scalar> m = lumped_weights(curve);
  const Points2<Scalar> omega = vertex_normal(curve);
  Points2<Scalar> r = surface_stiffness_apply(curve, curve.positions());
  for (Index k = 0; k < curve.num_vertices(); ++k) r.col(k) += kappa[k] * m[k] * omega.col(k);
  return r.cwiseAbs().maxCoeff();
}

/// Vertices where the curve turns against its loop's sense.
template <class Scalar>
Index count_reflex_vertices(const BasicCurve<Scalar>& curve, Scalar tolerance = Scalar(0)) {
  Index count = 0;
  for (Index k = 0; k < curve.num_vertices(); ++k) {
    const Vec2<Scalar> e0 = curve.edge(curve.prev(k));
    const Vec2<Scalar> e1 = curve.edge(k);
    const Scalar turn = (e0.x() * e1.y() - e0.y() * e1.x()) / (e0.norm() * e1.norm());
    // Boundary loops run clockwise, so convex corners turn right (negative).
    if (turn > tolerance) ++count;
  }
  return count;
}

namespace detail {
template <class Scalar>
Scalar orient2d(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

template <class Scalar>
bool on_segment(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}
}  // namespace detail

template <class Scalar>
bool segments_intersect(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c,
                        const Vec2<Scalar>& d) {
  using detail::on_segment;
  using detail::orient2d;
  const Scalar d1 = orient2d(c, d, a);
  const Scalar d2 = orient2d(c, d, b);
  const Scalar d3 = orient2d(a, b, c);
  const Scalar d4 = orient2d(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

/// True if two non-adjacent elements intersect (sweep over x-extents).
template <class Scalar>
bool has_self_intersection(const BasicCurve<Scalar>& curve) {
  const Index n = curve.num_elements();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  auto xmin = [&](Index j) { return std::min(curve.vertex(j).x(), curve.vertex(curve.next(j)).x()); };
  auto xmax = [&](Index j) { return std::max(curve.vertex(j).x(), curve.vertex(curve.next(j)).x()); };
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return xmin(a) < xmin(b); });
  std::vector<Index> active;
  for (Index j : order) {
    const Scalar x0 = xmin(j);
    active.erase(std::remove_if(active.begin(), active.end(), [&](Index o) { return xmax(o) < x0; }),
                 active.end());
    for (Index o : active) {
      if (o == j || curve.next(o) == j || curve.next(j) == o) continue;
      if (segments_intersect<Scalar>(curve.vertex(j), curve.vertex(curve.next(j)), curve.vertex(o),
                                     curve.vertex(curve.next(o))))
        return true;
    }
    active.push_back(j);
  }
  return false;
}

/// Largest element diameter h_Gamma.
template <class Scalar>
Scalar max_element_diameter(const BasicCurve<Scalar>& curve) {
  return element_lengths(curve).maxCoeff();
}

}  // namespace mstrack
