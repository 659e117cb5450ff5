#pragma once

#include <mstrack/curve.hpp>

#include <iosfwd>
#include <string>

namespace mstrack {

/// Plain-text polyline snapshot: per loop a header line
/// `# component k, K_k vertices, closed` followed by `x y` rows; loops are
/// separated by blank lines.
void write_polyline(std::ostream& out, const Curve& curve);
Curve read_polyline(std::istream& in);

void save_polyline(const std::string& path, const Curve& curve);
Curve load_polyline(const std::string& path);

}  // namespace mstrack
