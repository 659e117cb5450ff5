#include <mstrack/shapes.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace mstrack {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix2X regular_polygon(double r, Index n, const Vector2& center) {
  Matrix2X p(2, n);
  for (Index k = 0; k < n; ++k) {
    const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    p.col(k) = center + r * Vector2(std::cos(theta), std::sin(theta));
  }
  return p;
}

// Splits each polygon side into a number of equal pieces proportional to its
// length (largest remainder), keeping every corner as a vertex.
Matrix2X subdivide_polygon(const std::vector<Vector2>& corners, Index vertices) {
  const auto n = static_cast<Index>(corners.size());
  if (vertices < n) throw ConfigError("too few vertices for the polygon corners");
  std::vector<double> len(static_cast<std::size_t>(n));
  double perimeter = 0;
  for (Index i = 0; i < n; ++i) {
    len[i] = (corners[(i + 1) % n] - corners[i]).norm();
    perimeter += len[i];
  }
  std::vector<Index> pieces(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Index>> remainder;
  Index used = 0;
  for (Index i = 0; i < n; ++i) {
    const double exact = static_cast<double>(vertices) * len[i] / perimeter;
    pieces[i] = std::max<Index>(1, static_cast<Index>(std::floor(exact)));
    used += pieces[i];
    remainder.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < vertices; r = (r + 1) % remainder.size(), ++used)
    ++pieces[remainder[r].second];
  for (Index i = n - 1; used > vertices; i = (i + n - 1) % n) {
    if (pieces[i] > 1) {
      --pieces[i];
      --used;
    }
  }
  Matrix2X p(2, vertices);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    const Vector2 a = corners[i];
    const Vector2 b = corners[(i + 1) % n];
    for (Index s = 0; s < pieces[i]; ++s)
      p.col(k++) = a + (b - a) * (static_cast<double>(s) / static_cast<double>(pieces[i]));
  }
  return p;
}

}  // namespace

Curve circle(double r, Index vertices, const Vector2& center) {
  if (!(r > 0)) throw ConfigError("circle radius must be positive");
  if (vertices < 3) throw ConfigError("circle needs at least 3 vertices");
  return Curve({regular_polygon(r, vertices, center)});
}

Curve concentric_pair(double r_inner, double r_outer, Index vertices_per_loop) {
  if (!(0 < r_inner && r_inner < r_outer)) throw ConfigError("concentric pair needs 0 < r1 < r2");
  if (vertices_per_loop < 3) throw ConfigError("concentric pair needs at least 3 vertices per loop");
  return Curve({regular_polygon(r_outer, vertices_per_loop, Vector2::Zero()),
                regular_polygon(r_inner, vertices_per_loop, Vector2::Zero())});
}

Curve stadium(double length, double width, Index vertices) {
  if (!(width > 0 && length >= width)) throw ConfigError("stadium needs length >= width > 0");
  if (vertices < 3) throw ConfigError("stadium needs at least 3 vertices");
  const double rho = width / 2;
  const double straight = length - width;
  const double perimeter = 2 * straight + 2 * kPi * rho;
  // Arclength parametrisation starting at the bottom midpoint, anticlockwise.
  auto point_at = [&](double s) -> Vector2 {
    s = std::fmod(s, perimeter);
    if (s < straight / 2) return {s, -rho};
    s -= straight / 2;
    if (s < kPi * rho) {
      const double phi = -kPi / 2 + s / rho;
      return {straight / 2 + rho * std::cos(phi), rho * std::sin(phi)};
    }
    s -= kPi * rho;
    if (s < straight) return {straight / 2 - s, rho};
    s -= straight;
    if (s < kPi * rho) {
      const double phi = kPi / 2 + s / rho;
      return {-straight / 2 + rho * std::cos(phi), rho * std::sin(phi)};
    }
    s -= kPi * rho;
    return {-straight / 2 + s, -rho};
  };
  Matrix2X p(2, vertices);
  for (Index k = 0; k < vertices; ++k)
    p.col(k) = point_at(perimeter * static_cast<double>(k) / static_cast<double>(vertices));
  return Curve({p});
}

Curve faceted_octagon_star(Index vertices, double scale) {
  // Cross with chamfered arm tips and chamfered reflex corners; all sides lie
  // at multiples of 45 degrees.
  const double a = 0.7 * scale;   // arm half width
  const double b = 2.4 * scale;   // arm reach
  const double c = 0.35 * scale;  // tip chamfer
  const double d = 0.3 * scale;   // reflex chamfer
  const std::vector<Vector2> corners = {
      {b - c, -a}, {b, -a + c},  {b, a - c},    {b - c, a},    {a + d, a},    {a, a + d},
      {a, b - c},  {a - c, b},   {-a + c, b},   {-a, b - c},   {-a, a + d},   {-a - d, a},
      {-b + c, a}, {-b, a - c},  {-b, -a + c},  {-b + c, -a},  {-a - d, -a},  {-a, -a - d},
      {-a, -b + c}, {-a + c, -b}, {a - c, -b},  {a, -b + c},   {a, -a - d},   {a + d, -a}};
  return Curve({subdivide_polygon(corners, vertices)});
}

ShapeSpec::Kind parse_shape_kind(const std::string& name) {
  if (name == "circle") return ShapeSpec::Kind::Circle;
  if (name == "concentric_pair" || name == "concentric-pair" || name == "annulus")
    return ShapeSpec::Kind::ConcentricPair;
  if (name == "stadium" || name == "cigar") return ShapeSpec::Kind::Stadium;
  if (name == "faceted_octagon_star" || name == "octagon-star" || name == "octagon_star")
    return ShapeSpec::Kind::OctagonStar;
  throw ConfigError("unknown shape type '" + name + "'");
}

std::string to_string(ShapeSpec::Kind kind) {
  switch (kind) {
    case ShapeSpec::Kind::Circle: return "circle";
    case ShapeSpec::Kind::ConcentricPair: return "concentric_pair";
    case ShapeSpec::Kind::Stadium: return "stadium";
    case ShapeSpec::Kind::OctagonStar: return "faceted_octagon_star";
  }
  return "unknown";
}

Curve make_curve(const ShapeSpec& spec, double H) {
  if (spec.vertices < 8) throw ConfigError("shape needs at least 8 vertices");
  Curve curve;
  switch (spec.kind) {
    case ShapeSpec::Kind::Circle: curve = circle(spec.radius, spec.vertices); break;
    case ShapeSpec::Kind::ConcentricPair:
      if (spec.vertices % 2 != 0) throw ConfigError("concentric pair needs an even vertex count");
      curve = concentric_pair(spec.inner_radius, spec.outer_radius, spec.vertices / 2);
      break;
    case ShapeSpec::Kind::Stadium: curve = stadium(spec.length, spec.width, spec.vertices); break;
    case ShapeSpec::Kind::OctagonStar: curve = faceted_octagon_star(spec.vertices, spec.scale); break;
  }
  require_inside(curve, H);
  return curve;
}

void require_inside(const Curve& curve, double H) {
  if (curve.positions().cwiseAbs().maxCoeff() >= H)
    throw ConfigError("curve does not fit strictly inside the domain (-H, H)^2");
}

}  // namespace mstrack
