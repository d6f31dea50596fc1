#pragma once

#include <array>
#include <span>
#include <vector>

#include "json.hpp"

namespace flowrecom::geo {

using Point = std::array<double, 2>;
using Ring = std::vector<Point>;  // closed: front() == back()

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

using MultiPolygon = std::vector<Polygon>;

// Shoelace area; positive for counter-clockwise rings.
double signed_area(const Ring& ring);
bool point_in_ring(const Point& p, const Ring& ring);

// GeoJSON Polygon or MultiPolygon geometry object.
MultiPolygon from_geojson(const nlohmann::json& geometry);
// MultiPolygon with outer rings counter-clockwise and holes clockwise.
nlohmann::json to_geojson(const MultiPolygon& shape);

// Union of polygons that tile without overlap and share vertices exactly:
// boundary segments traversed in opposite directions cancel and the
// remainder is chained back into rings.
MultiPolygon dissolve(std::span<const MultiPolygon> parts);

}  // namespace flowrecom::geo
