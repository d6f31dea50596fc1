#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flowrecom/flows.hpp"

namespace flowrecom {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
using DistrictId = std::int32_t;  // dense labels 1..K

struct UnitNode {
  std::string id;
  long long population = 0;
  long long voting_age_pop = 0;
  double votes_dem = 0.0;
  double votes_rep = 0.0;
  double area = 0.0;       // km^2
  double perimeter = 0.0;  // km, full boundary of the unit
};

// Edge as read from the edge table, before endpoint resolution.
struct EdgeInput {
  std::string u;
  std::string v;
  double shared_perimeter = 0.0;
};

struct UnitEdge {
  NodeIndex u = 0;  // u < v
  NodeIndex v = 0;
  double shared_perimeter = 0.0;
  double flow_weight = 0.0;  // s(u,v) + s(v,u)
};

struct FlowArc {
  NodeIndex target = 0;
  double flow = 0.0;
};

// Immutable dual graph with the O-D flows re-indexed by node. Node indices
// follow input order; edges are sorted by (u, v) index pair, which is the
// canonical edge order used for tie-breaking everywhere.
class UnitGraph {
 public:
  struct Neighbor {
    NodeIndex node;
    EdgeIndex edge;
  };

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const UnitNode> nodes() const { return nodes_; }
  const UnitNode& node(NodeIndex i) const { return nodes_.at(i); }
  std::span<const UnitEdge> edges() const { return edges_; }
  const UnitEdge& edge(EdgeIndex e) const { return edges_.at(e); }

  std::span<const Neighbor> neighbors(NodeIndex i) const {
    return {adjacency_.data() + adjacency_offsets_[i],
            adjacency_offsets_[i + 1] - adjacency_offsets_[i]};
  }
  // Outgoing flows of a node, self flow included, ascending target order.
  std::span<const FlowArc> out_flows(NodeIndex i) const {
    return {arcs_.data() + arc_offsets_[i], arc_offsets_[i + 1] - arc_offsets_[i]};
  }

  std::optional<NodeIndex> find(std::string_view id) const;
  NodeIndex index_of(std::string_view id) const;  // throws UnknownEndpoint

  const FlowMatrix& flows() const { return flows_; }
  // Sum over all arcs in node order; the reference total for conservation.
  double total_flow() const { return total_flow_; }
  long long total_population() const { return total_population_; }

  friend UnitGraph build_graph(std::vector<UnitNode> nodes, std::span<const EdgeInput> edges,
                               const FlowMatrix& flows);

 private:
  std::vector<UnitNode> nodes_;
  std::vector<UnitEdge> edges_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<std::size_t> arc_offsets_;
  std::vector<FlowArc> arcs_;
  FlowMatrix flows_;
  double total_flow_ = 0.0;
  long long total_population_ = 0;
};

// Validates nodes and edges, symmetrizes adjacent flows into flow_weight and
// requires the graph to be connected. Flow entries must reference known units.
UnitGraph build_graph(std::vector<UnitNode> nodes, std::span<const EdgeInput> edges,
                      const FlowMatrix& flows);

struct DistrictStats {
  std::size_t units = 0;
  long long population = 0;
  double votes_dem = 0.0;
  double votes_rep = 0.0;
  double area = 0.0;
  double node_perimeter_sum = 0.0;
  double interior_shared_perimeter = 0.0;
  double intra_flow = 0.0;  // flows with both ends in the district
  double out_flow = 0.0;    // flows originating in the district

  friend bool operator==(const DistrictStats&, const DistrictStats&) = default;
};

// Assignment of every unit to one of K districts with cached per-district
// aggregates and the cut-edge set. Caches are always computed by the same
// node-ordered routine, so recomputation from scratch is bit-identical.
class Partition {
 public:
  // Requires a total assignment with dense nonempty labels 1..K. Contiguity is
  // not checked here; see contiguous().
  static Partition from_assignment(const UnitGraph& graph, std::vector<DistrictId> labels);
  static Partition from_map(const UnitGraph& graph,
                            const std::map<std::string, DistrictId>& labels);

  int district_count() const { return k_; }
  std::size_t unit_count() const { return assignment_.size(); }
  DistrictId district_of(NodeIndex i) const { return assignment_[i]; }
  std::span<const DistrictId> assignment() const { return assignment_; }
  const DistrictStats& district(DistrictId d) const;
  std::vector<NodeIndex> members(DistrictId d) const;

  // Cut edges in insertion order (used for uniform sampling).
  std::span<const EdgeIndex> cut_edges() const { return cut_list_; }
  bool is_cut(EdgeIndex e) const { return cut_pos_[e] != kNotCut; }

  double intra_flow_sum() const;
  double inter_flow_sum() const { return total_flow_ - intra_flow_sum(); }
  double total_flow() const { return total_flow_; }

  // Moves the listed nodes (each currently in a or b) to the given labels
  // (each a or b) and refreshes the caches of a and b and the cut set.
  void reassign(const UnitGraph& graph, DistrictId a, DistrictId b,
                std::span<const NodeIndex> nodes, std::span<const DistrictId> labels);

  bool same_assignment(const Partition& other) const { return assignment_ == other.assignment_; }
  friend bool operator==(const Partition&, const Partition&) = default;

  // Restores a partition whose cut list order was saved; used by checkpoints.
  static Partition restore(const UnitGraph& graph, std::vector<DistrictId> labels,
                           std::vector<EdgeIndex> cut_order);

 private:
  static constexpr std::uint32_t kNotCut = 0xFFFFFFFFu;
  void refresh_district(const UnitGraph& graph, DistrictId d);
  void set_cut(EdgeIndex e, bool cut);

  std::vector<DistrictId> assignment_;
  int k_ = 0;
  std::vector<DistrictStats> stats_;  // index d - 1
  std::vector<EdgeIndex> cut_list_;
  std::vector<std::uint32_t> cut_pos_;
  double total_flow_ = 0.0;
};

// Sum of flows whose endpoints are both in district d under `labels`,
// iterating nodes in ascending order. Shared by Partition caches and
// incremental IR evaluation.
double district_intra_flow(const UnitGraph& graph, std::span<const DistrictId> labels,
                           std::span<const NodeIndex> members, DistrictId d);

bool contiguous(const Partition& partition, const UnitGraph& graph);
std::size_t cut_edge_count(const Partition& partition);

struct DistrictGeometry {
  double area = 0.0;
  double perimeter = 0.0;
};

// perimeter = sum of unit perimeters - 2 * shared perimeter of interior edges.
DistrictGeometry district_geometry(const Partition& partition, DistrictId d);

namespace io {

std::vector<UnitNode> read_nodes(const std::filesystem::path& path);
std::vector<EdgeInput> read_edges(const std::filesystem::path& path);
std::map<std::string, DistrictId> read_assignment(const std::filesystem::path& path);
void write_assignment(const UnitGraph& graph, const Partition& partition,
                      const std::filesystem::path& path);

}  // namespace io

}  // namespace flowrecom
