#include "flowrecom/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>

#include "flowrecom/csv.hpp"
#include "flowrecom/error.hpp"

namespace flowrecom {
namespace {

void validate_node(const UnitNode& n) {
  if (n.population < 0 || n.voting_age_pop < 0 || n.voting_age_pop > n.population) {
    throw Error(Errc::InvalidNode, n.id + ": need 0 <= voting_age_pop <= population");
  }
  if (!(n.area > 0.0) || !(n.perimeter > 0.0)) {
    throw Error(Errc::InvalidNode, n.id + ": area and perimeter must be positive");
  }
  if (!(n.votes_dem >= 0.0) || !(n.votes_rep >= 0.0)) {
    throw Error(Errc::InvalidNode, n.id + ": votes must be nonnegative");
  }
}

// Connected components over the adjacency lists, each in ascending order.
std::vector<std::vector<NodeIndex>> components(const UnitGraph& g) {
  std::vector<int> seen(g.node_count(), 0);
  std::vector<std::vector<NodeIndex>> out;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<NodeIndex> comp{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (const auto& nb : g.neighbors(comp[i])) {
        if (!seen[nb.node]) {
          seen[nb.node] = 1;
          comp.push_back(nb.node);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

std::optional<NodeIndex> UnitGraph::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex UnitGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(Errc::UnknownEndpoint, std::string(id));
}

UnitGraph build_graph(std::vector<UnitNode> nodes, std::span<const EdgeInput> edges,
                      const FlowMatrix& flows) {
  UnitGraph g;
  g.nodes_ = std::move(nodes);
  for (NodeIndex i = 0; i < g.nodes_.size(); ++i) {
    validate_node(g.nodes_[i]);
    if (!g.index_.emplace(g.nodes_[i].id, i).second) {
      throw Error(Errc::DuplicateNode, g.nodes_[i].id);
    }
    g.total_population_ += g.nodes_[i].population;
  }
  if (g.nodes_.empty()) throw Error(Errc::InvalidNode, "graph has no nodes");

  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const auto& e : edges) {
    NodeIndex u = g.index_of(e.u);
    NodeIndex v = g.index_of(e.v);
    if (u == v) throw Error(Errc::InvalidNode, "self-loop edge on " + e.u);
    if (u > v) std::swap(u, v);
    if (!seen.emplace(u, v).second) throw Error(Errc::DuplicateEdge, e.u + "-" + e.v);
    const double limit = std::min(g.nodes_[u].perimeter, g.nodes_[v].perimeter);
    if (!(e.shared_perimeter >= 0.0) || e.shared_perimeter > limit * (1.0 + 1e-9)) {
      throw Error(Errc::InvalidNode, "edge " + e.u + "-" + e.v +
                                         ": shared_perimeter outside [0, min perimeter]");
    }
    g.edges_.push_back({u, v, e.shared_perimeter,
                        flows.at(e.u, e.v) + flows.at(e.v, e.u)});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const UnitEdge& a, const UnitEdge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });

  const std::size_t n = g.nodes_.size();
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : g.edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  g.adjacency_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.adjacency_offsets_[i + 1] = g.adjacency_offsets_[i] + degree[i];
  g.adjacency_.resize(g.adjacency_offsets_[n]);
  std::vector<std::size_t> fill(g.adjacency_offsets_.begin(), g.adjacency_offsets_.end() - 1);
  for (EdgeIndex ei = 0; ei < g.edges_.size(); ++ei) {
    const auto& e = g.edges_[ei];
    g.adjacency_[fill[e.u]++] = {e.v, ei};
    g.adjacency_[fill[e.v]++] = {e.u, ei};
  }

  std::vector<std::vector<FlowArc>> arcs(n);
  for (const auto& [key, value] : flows.entries()) {
    const auto o = g.find(key.first);
    const auto d = g.find(key.second);
    if (!o || !d) {
      throw Error(Errc::UnknownEndpoint, "flow " + key.first + "->" + key.second +
                                             " references a unit not in the node table");
    }
    arcs[*o].push_back({*d, value});
  }
  g.arc_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(arcs[i].begin(), arcs[i].end(),
              [](const FlowArc& a, const FlowArc& b) { return a.target < b.target; });
    g.arc_offsets_[i + 1] = g.arc_offsets_[i] + arcs[i].size();
    for (const auto& a : arcs[i]) {
      g.arcs_.push_back(a);
      g.total_flow_ += a.flow;
    }
  }
  g.flows_ = flows;

  const auto comps = components(g);
  if (comps.size() > 1) {
    std::string msg = std::to_string(comps.size()) + " components:";
    for (std::size_t c = 0; c < comps.size() && c < 8; ++c) {
      msg += " [";
      for (std::size_t j = 0; j < comps[c].size() && j < 6; ++j) {
        msg += (j ? "," : "") + g.nodes_[comps[c][j]].id;
      }
      if (comps[c].size() > 6) msg += ",...";
      msg += "]";
    }
    throw Error(Errc::DisconnectedGraph, msg);
  }
  return g;
}

double district_intra_flow(const UnitGraph& graph, std::span<const DistrictId> labels,
                           std::span<const NodeIndex> members, DistrictId d) {
  double sum = 0.0;
  for (const NodeIndex x : members) {
    for (const auto& arc : graph.out_flows(x)) {
      if (labels[arc.target] == d) sum += arc.flow;
    }
  }
  return sum;
}

Partition Partition::from_assignment(const UnitGraph& graph, std::vector<DistrictId> labels) {
  if (labels.size() != graph.node_count()) {
    throw Error(Errc::InvalidPartition, "assignment covers " + std::to_string(labels.size()) +
                                            " of " + std::to_string(graph.node_count()) + " units");
  }
  DistrictId k = 0;
  for (const auto d : labels) {
    if (d < 1) throw Error(Errc::InvalidPartition, "district labels must be >= 1");
    k = std::max(k, d);
  }
  std::vector<char> used(static_cast<std::size_t>(k) + 1, 0);
  for (const auto d : labels) used[static_cast<std::size_t>(d)] = 1;
  for (DistrictId d = 1; d <= k; ++d) {
    if (!used[static_cast<std::size_t>(d)]) {
      throw Error(Errc::InvalidPartition, "district " + std::to_string(d) + " is empty");
    }
  }
  Partition p;
  p.assignment_ = std::move(labels);
  p.k_ = k;
  p.stats_.resize(static_cast<std::size_t>(k));
  p.total_flow_ = graph.total_flow();
  p.cut_pos_.assign(graph.edge_count(), kNotCut);
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    if (p.assignment_[edge.u] != p.assignment_[edge.v]) p.set_cut(e, true);
  }
  for (DistrictId d = 1; d <= k; ++d) p.refresh_district(graph, d);
  return p;
}

Partition Partition::from_map(const UnitGraph& graph,
                              const std::map<std::string, DistrictId>& labels) {
  std::vector<DistrictId> v(graph.node_count(), 0);
  for (const auto& [id, d] : labels) {
    const auto i = graph.find(id);
    if (!i) throw Error(Errc::UnknownUnitInAssignment, id);
    v[*i] = d;
  }
  for (NodeIndex i = 0; i < v.size(); ++i) {
    if (v[i] == 0) throw Error(Errc::InvalidPartition, "unit " + graph.node(i).id + " unassigned");
  }
  return from_assignment(graph, std::move(v));
}

Partition Partition::restore(const UnitGraph& graph, std::vector<DistrictId> labels,
                             std::vector<EdgeIndex> cut_order) {
  Partition p = from_assignment(graph, std::move(labels));
  std::vector<EdgeIndex> expected = p.cut_list_;
  std::vector<EdgeIndex> given = cut_order;
  std::sort(expected.begin(), expected.end());
  std::sort(given.begin(), given.end());
  if (expected != given) {
    throw Error(Errc::CorruptCheckpoint, "cut-edge list does not match assignment");
  }
  p.cut_list_ = std::move(cut_order);
  for (std::uint32_t i = 0; i < p.cut_list_.size(); ++i) p.cut_pos_[p.cut_list_[i]] = i;
  return p;
}

const DistrictStats& Partition::district(DistrictId d) const {
  if (d < 1 || d > k_) throw Error(Errc::UnknownDistrict, std::to_string(d));
  return stats_[static_cast<std::size_t>(d - 1)];
}

std::vector<NodeIndex> Partition::members(DistrictId d) const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] == d) out.push_back(i);
  }
  return out;
}

double Partition::intra_flow_sum() const {
  double sum = 0.0;
  for (const auto& s : stats_) sum += s.intra_flow;
  return sum;
}

void Partition::set_cut(EdgeIndex e, bool cut) {
  const bool now = cut_pos_[e] != kNotCut;
  if (now == cut) return;
  if (cut) {
    cut_pos_[e] = static_cast<std::uint32_t>(cut_list_.size());
    cut_list_.push_back(e);
  } else {
    const std::uint32_t pos = cut_pos_[e];
    const EdgeIndex last = cut_list_.back();
    cut_list_[pos] = last;
    cut_pos_[last] = pos;
    cut_list_.pop_back();
    cut_pos_[e] = kNotCut;
  }
}

void Partition::refresh_district(const UnitGraph& graph, DistrictId d) {
  const auto nodes = members(d);
  DistrictStats s;
  s.units = nodes.size();
  for (const NodeIndex x : nodes) {
    const auto& n = graph.node(x);
    s.population += n.population;
    s.votes_dem += n.votes_dem;
    s.votes_rep += n.votes_rep;
    s.area += n.area;
    s.node_perimeter_sum += n.perimeter;
    for (const auto& nb : graph.neighbors(x)) {
      if (nb.node > x && assignment_[nb.node] == d) {
        s.interior_shared_perimeter += graph.edge(nb.edge).shared_perimeter;
      }
    }
    for (const auto& arc : graph.out_flows(x)) s.out_flow += arc.flow;
  }
  s.intra_flow = district_intra_flow(graph, assignment_, nodes, d);
  stats_[static_cast<std::size_t>(d - 1)] = s;
}

void Partition::reassign(const UnitGraph& graph, DistrictId a, DistrictId b,
                         std::span<const NodeIndex> nodes, std::span<const DistrictId> labels) {
  if (nodes.size() != labels.size()) {
    throw Error(Errc::ProposalOutsideMergedRegion, "nodes and labels differ in length");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const DistrictId cur = assignment_.at(nodes[i]);
    if ((cur != a && cur != b) || (labels[i] != a && labels[i] != b)) {
      throw Error(Errc::ProposalOutsideMergedRegion,
                  "unit " + graph.node(nodes[i]).id + " is outside districts " +
                      std::to_string(a) + "/" + std::to_string(b));
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) assignment_[nodes[i]] = labels[i];
  for (const NodeIndex x : nodes) {
    for (const auto& nb : graph.neighbors(x)) {
      set_cut(nb.edge, assignment_[x] != assignment_[nb.node]);
    }
  }
  refresh_district(graph, a);
  refresh_district(graph, b);
  if (stats_[static_cast<std::size_t>(a - 1)].units == 0 ||
      stats_[static_cast<std::size_t>(b - 1)].units == 0) {
    throw Error(Errc::InvalidPartition, "reassignment emptied a district");
  }
}

bool contiguous(const Partition& partition, const UnitGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<char> seen(n, 0);
  std::vector<char> district_done(static_cast<std::size_t>(partition.district_count()) + 1, 0);
  std::deque<NodeIndex> queue;
  for (NodeIndex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    const DistrictId d = partition.district_of(s);
    // A second unseen seed for the same district means a split district.
    if (district_done[static_cast<std::size_t>(d)]) return false;
    district_done[static_cast<std::size_t>(d)] = 1;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      const NodeIndex x = queue.front();
      queue.pop_front();
      for (const auto& nb : graph.neighbors(x)) {
        if (!seen[nb.node] && partition.district_of(nb.node) == d) {
          seen[nb.node] = 1;
          queue.push_back(nb.node);
        }
      }
    }
  }
  return true;
}

std::size_t cut_edge_count(const Partition& partition) { return partition.cut_edges().size(); }

DistrictGeometry district_geometry(const Partition& partition, DistrictId d) {
  const auto& s = partition.district(d);
  return {s.area, s.node_perimeter_sum - 2.0 * s.interior_shared_perimeter};
}

namespace io {

std::vector<UnitNode> read_nodes(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(
      t, {"id", "population", "voting_age_pop", "votes_dem", "votes_rep", "area", "perimeter"});
  std::vector<UnitNode> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({t.rows[i][0], csv::to_int(t, i, 1), csv::to_int(t, i, 2),
                   csv::to_double(t, i, 3), csv::to_double(t, i, 4), csv::to_double(t, i, 5),
                   csv::to_double(t, i, 6)});
  }
  return out;
}

std::vector<EdgeInput> read_edges(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(t, {"u", "v", "shared_perimeter"});
  std::vector<EdgeInput> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({t.rows[i][0], t.rows[i][1], csv::to_double(t, i, 2)});
  }
  return out;
}

std::map<std::string, DistrictId> read_assignment(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(t, {"unit_id", "district"});
  std::map<std::string, DistrictId> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto d = csv::to_int(t, i, 1);
    if (!out.emplace(t.rows[i][0], static_cast<DistrictId>(d)).second) {
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(t.line_numbers[i]) +
                                        ": unit listed twice: " + t.rows[i][0]);
    }
  }
  return out;
}

void write_assignment(const UnitGraph& graph, const Partition& partition,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << "unit_id,district\n";
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    out << graph.node(i).id << ',' << partition.district_of(i) << '\n';
  }
}

}  // namespace io
}  // namespace flowrecom
