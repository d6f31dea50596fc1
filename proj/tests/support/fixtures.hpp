#pragma once

// Synthetic instances shared by the unit and acceptance suites.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "flowrecom/graph.hpp"
#include "flowrecom/rng.hpp"

namespace fixtures {

using flowrecom::DistrictId;
using flowrecom::FlowMatrix;
using flowrecom::UnitGraph;

inline std::string cell(int r, int c) { return "r" + std::to_string(r) + "c" + std::to_string(c); }

struct GridSpec {
  int rows = 4;
  int cols = 4;
  std::function<long long(int, int)> population = [](int, int) { return 1LL; };
  std::function<std::pair<double, double>(int, int)> votes = [](int r, int c) {
    // Rep totals carry n/1024 for an n-unit district, so no district of
    // fewer than 1024 units can tie.
    return std::pair{10.0 + (r * 7 + c * 3) % 5, 10.0 + (r * 3 + c * 5) % 7 + 1.0 / 1024};
  };
};

// Unit squares with rook adjacency; every shared side has length 1.
inline std::vector<flowrecom::UnitNode> grid_nodes(const GridSpec& spec) {
  std::vector<flowrecom::UnitNode> nodes;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const auto [d, rep] = spec.votes(r, c);
      const long long pop = spec.population(r, c);
      nodes.push_back({cell(r, c), pop, pop, d, rep, 1.0, 4.0});
    }
  }
  return nodes;
}

inline std::vector<flowrecom::EdgeInput> grid_edges(int rows, int cols) {
  std::vector<flowrecom::EdgeInput> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({cell(r, c), cell(r, c + 1), 1.0});
      if (r + 1 < rows) edges.push_back({cell(r, c), cell(r + 1, c), 1.0});
    }
  }
  return edges;
}

// Random nonnegative flows on a random subset of ordered pairs, self flows
// included.
inline FlowMatrix random_flows(int rows, int cols, std::uint64_t seed, double density = 0.3) {
  flowrecom::Rng rng(seed);
  FlowMatrix m;
  const int n = rows * cols;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b && rng.uniform() > density) continue;
      const double v = std::floor(rng.uniform() * 50.0) + 1.0;
      m.add(cell(a / cols, a % cols), cell(b / cols, b % cols), v);
    }
  }
  return m;
}

// Two planted communities (left and right halves). Every pair within
// Manhattan distance `radius` exchanges flow: `strong` inside a community,
// `weak` across.
inline FlowMatrix community_flows(int rows, int cols, double strong = 10.0, double weak = 1.0,
                                  int radius = 2) {
  FlowMatrix m;
  for (int r1 = 0; r1 < rows; ++r1) {
    for (int c1 = 0; c1 < cols; ++c1) {
      for (int r2 = 0; r2 < rows; ++r2) {
        for (int c2 = 0; c2 < cols; ++c2) {
          const int dist = std::abs(r1 - r2) + std::abs(c1 - c2);
          if (dist == 0 || dist > radius) continue;
          const bool same = (c1 < cols / 2) == (c2 < cols / 2);
          m.add(cell(r1, c1), cell(r2, c2), same ? strong : weak);
        }
      }
    }
  }
  return m;
}

inline UnitGraph grid_graph(const GridSpec& spec, const FlowMatrix& flows) {
  const auto edges = grid_edges(spec.rows, spec.cols);
  return flowrecom::build_graph(grid_nodes(spec), edges, flows);
}

// Labels from a function of (row, col), in node order.
inline std::vector<DistrictId> grid_labels(int rows, int cols,
                                           const std::function<DistrictId(int, int)>& f) {
  std::vector<DistrictId> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out.push_back(f(r, c));
  }
  return out;
}

// Four districts on a 2x4 grid of units, two units each, carrying the worked
// example flows: intra 7, 9, 11, 13 and twelve inter flows summing to 32.
//   district 1: r0c0 r0c1   district 2: r0c2 r0c3
//   district 3: r1c0 r1c1   district 4: r1c2 r1c3
struct WorkedExample {
  UnitGraph graph;
  std::vector<DistrictId> labels;
};

inline WorkedExample worked_example() {
  FlowMatrix m;
  m.add("r0c0", "r0c1", 7);
  m.add("r0c2", "r0c3", 9);
  m.add("r1c0", "r1c1", 11);
  m.add("r1c2", "r1c3", 13);
  // Inter flows 1,1,1,4,4,2,3,3,5,2,3,3.
  m.add("r0c1", "r0c2", 1);
  m.add("r0c2", "r0c1", 1);
  m.add("r0c0", "r1c0", 1);
  m.add("r1c0", "r0c0", 4);
  m.add("r0c3", "r1c3", 4);
  m.add("r1c3", "r0c3", 2);
  m.add("r1c1", "r1c2", 3);
  m.add("r1c2", "r1c1", 3);
  m.add("r0c1", "r1c2", 5);
  m.add("r1c2", "r0c1", 2);
  m.add("r0c2", "r1c1", 3);
  m.add("r1c1", "r0c2", 3);
  GridSpec spec;
  spec.rows = 2;
  spec.cols = 4;
  auto graph = grid_graph(spec, m);
  auto labels = grid_labels(2, 4, [](int r, int c) { return 1 + (c >= 2 ? 1 : 0) + 2 * r; });
  return {std::move(graph), std::move(labels)};
}

}  // namespace fixtures
