#include "flowrecom/dissolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "flowrecom/error.hpp"

namespace flowrecom::geo {
namespace {

Ring parse_ring(const nlohmann::json& coords) {
  Ring ring;
  for (const auto& p : coords) ring.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  if (ring.size() < 4 || ring.front() != ring.back()) {
    throw Error(Errc::ParseError, "GeoJSON ring must be closed with >= 4 positions");
  }
  return ring;
}

Polygon parse_polygon(const nlohmann::json& coords) {
  Polygon poly;
  if (!coords.is_array() || coords.empty()) throw Error(Errc::ParseError, "empty polygon");
  poly.outer = parse_ring(coords.at(0));
  for (std::size_t i = 1; i < coords.size(); ++i) poly.holes.push_back(parse_ring(coords[i]));
  return poly;
}

void orient(Ring& ring, bool ccw) {
  if ((signed_area(ring) > 0.0) != ccw) std::reverse(ring.begin(), ring.end());
}

nlohmann::json ring_json(const Ring& ring) {
  auto out = nlohmann::json::array();
  for (const auto& p : ring) out.push_back({p[0], p[1]});
  return out;
}

}  // namespace

double signed_area(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += ring[i][0] * ring[i + 1][1] - ring[i + 1][0] * ring[i][1];
  }
  return twice / 2.0;
}

bool point_in_ring(const Point& p, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 2; i + 1 < ring.size(); j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a[1] > p[1]) != (b[1] > p[1]) &&
        p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]) {
      inside = !inside;
    }
  }
  return inside;
}

MultiPolygon from_geojson(const nlohmann::json& geometry) {
  if (!geometry.is_object()) throw Error(Errc::MissingGeometry, "feature has no geometry");
  const auto type = geometry.value("type", std::string());
  MultiPolygon out;
  if (type == "Polygon") {
    out.push_back(parse_polygon(geometry.at("coordinates")));
  } else if (type == "MultiPolygon") {
    for (const auto& c : geometry.at("coordinates")) out.push_back(parse_polygon(c));
  } else {
    throw Error(Errc::ParseError, "unsupported geometry type '" + type + "'");
  }
  return out;
}

nlohmann::json to_geojson(const MultiPolygon& shape) {
  auto coords = nlohmann::json::array();
  for (auto poly : shape) {
    orient(poly.outer, true);
    auto rings = nlohmann::json::array({ring_json(poly.outer)});
    for (auto hole : poly.holes) {
      orient(hole, false);
      rings.push_back(ring_json(hole));
    }
    coords.push_back(std::move(rings));
  }
  return {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}};
}

MultiPolygon dissolve(std::span<const MultiPolygon> parts) {
  // Net multiplicity of each directed segment with the interior on its left.
  std::map<std::pair<Point, Point>, int> net;
  const auto add_ring = [&](Ring ring, bool ccw) {
    orient(ring, ccw);
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      if (ring[i] == ring[i + 1]) continue;
      const auto rev = net.find({ring[i + 1], ring[i]});
      if (rev != net.end()) {
        if (--rev->second == 0) net.erase(rev);
      } else {
        ++net[{ring[i], ring[i + 1]}];
      }
    }
  };
  for (const auto& part : parts) {
    for (const auto& poly : part) {
      add_ring(poly.outer, true);
      for (const auto& hole : poly.holes) add_ring(hole, false);
    }
  }

  std::multimap<Point, Point> outgoing;
  for (const auto& [seg, count] : net) {
    for (int c = 0; c < count; ++c) outgoing.emplace(seg.first, seg.second);
  }

  std::vector<Ring> rings;
  while (!outgoing.empty()) {
    auto it = outgoing.begin();
    const Point start = it->first;
    Ring ring{start};
    Point cur = it->second;
    outgoing.erase(it);
    ring.push_back(cur);
    while (cur != start) {
      const auto next = outgoing.find(cur);
      if (next == outgoing.end()) {
        throw Error(Errc::ParseError, "unit polygons do not share vertices; cannot dissolve");
      }
      cur = next->second;
      outgoing.erase(next);
      ring.push_back(cur);
    }
    rings.push_back(std::move(ring));
  }

  MultiPolygon out;
  std::vector<Ring> holes;
  for (auto& r : rings) {
    if (signed_area(r) > 0.0) out.push_back({std::move(r), {}});
    else holes.push_back(std::move(r));
  }
  for (auto& h : holes) {
    // A point just left of a clockwise hole edge lies inside the district.
    const Point& a = h[0];
    const Point& b = h[1];
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len = std::hypot(dx, dy);
    const Point probe{(a[0] + b[0]) / 2.0 - dy / len * 1e-9 * len,
                      (a[1] + b[1]) / 2.0 + dx / len * 1e-9 * len};
    std::size_t best = out.size();
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double area = signed_area(out[i].outer);
      if (area < best_area && point_in_ring(probe, out[i].outer)) {
        best = i;
        best_area = area;
      }
    }
    if (best == out.size()) throw Error(Errc::ParseError, "hole outside every dissolved ring");
    out[best].holes.push_back(std::move(h));
  }
  return out;
}

}  // namespace flowrecom::geo
