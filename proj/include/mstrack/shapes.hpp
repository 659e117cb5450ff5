#pragma once

#include <mstrack/curve.hpp>

#include <string>

namespace mstrack {

/// Regular K-gon with vertices on the circle of radius r, first vertex at angle 0.
Curve circle(double r, Index vertices, const Vector2& center = Vector2::Zero());

/// Annulus boundary: two concentric regular polygons with the given vertex
/// count per loop; the inner loop is oriented towards the hole.
Curve concentric_pair(double r_inner, double r_outer, Index vertices_per_loop);

/// Rectangle of total extent length x width with semicircular caps, vertices
/// equally spaced in arclength.
Curve stadium(double length, double width, Index vertices);

/// Nonconvex cross-shaped curve whose facets are all parallel to the facets
/// of a regular octagon with facet normals at multiples of 45 degrees. Every
/// facet corner is a vertex; the remaining vertices are spread by arclength.
Curve faceted_octagon_star(Index vertices, double scale = 1.0);

struct ShapeSpec {
  enum class Kind { Circle, ConcentricPair, Stadium, OctagonStar };
  Kind kind = Kind::Circle;
  double radius = 1.0;
  double inner_radius = 2.5;
  double outer_radius = 3.0;
  double length = 7.0;
  double width = 1.0;
  double scale = 1.0;
  Index vertices = 256;  // total over all loops
};

ShapeSpec::Kind parse_shape_kind(const std::string& name);
std::string to_string(ShapeSpec::Kind kind);

/// Builds the curve and checks it lies strictly inside (-H, H)^2.
Curve make_curve(const ShapeSpec& spec, double H);

/// Throws ConfigError unless every vertex lies strictly inside (-H, H)^2.
void require_inside(const Curve& curve, double H);

}  // namespace mstrack
