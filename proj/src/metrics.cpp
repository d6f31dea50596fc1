#include "flowrecom/metrics.hpp"

#include <cmath>
#include <numbers>

#include "flowrecom/error.hpp"

namespace flowrecom {

InteractionRatio interaction_ratio(const Partition& partition, const UnitGraph& graph) {
  InteractionRatio r;
  for (NodeIndex o = 0; o < graph.node_count(); ++o) {
    const DistrictId d = partition.district_of(o);
    for (const auto& arc : graph.out_flows(o)) {
      if (partition.district_of(arc.target) == d) {
        r.intra += arc.flow;
      } else {
        r.inter += arc.flow;
      }
    }
  }
  if (!(r.inter > 0.0)) {
    throw Error(Errc::ZeroInterFlows, "no flow crosses a district boundary");
  }
  r.ir = r.intra / r.inter;
  return r;
}

FlowSums ir_delta(const Partition& partition, const UnitGraph& graph, DistrictId a, DistrictId b,
                  std::span<const NodeIndex> nodes, std::span<const DistrictId> labels) {
  if (nodes.size() != labels.size()) {
    throw Error(Errc::ProposalOutsideMergedRegion, "nodes and labels differ in length");
  }
  const auto& sa = partition.district(a);
  const auto& sb = partition.district(b);
  std::vector<DistrictId> next(partition.assignment().begin(), partition.assignment().end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const DistrictId cur = next.at(nodes[i]);
    if ((cur != a && cur != b) || (labels[i] != a && labels[i] != b)) {
      throw Error(Errc::ProposalOutsideMergedRegion,
                  "unit " + graph.node(nodes[i]).id + " moves outside the merged pair");
    }
    next[nodes[i]] = labels[i];
  }
  std::vector<NodeIndex> in_a;
  std::vector<NodeIndex> in_b;
  for (NodeIndex i = 0; i < next.size(); ++i) {
    if (next[i] == a) in_a.push_back(i);
    else if (next[i] == b) in_b.push_back(i);
  }
  const double old_local = sa.intra_flow + sb.intra_flow;
  const double new_local = district_intra_flow(graph, next, in_a, a) +
                           district_intra_flow(graph, next, in_b, b);
  FlowSums out;
  out.intra = partition.intra_flow_sum() - old_local + new_local;
  out.inter = partition.total_flow() - out.intra;
  return out;
}

double polsby_popper(double area, double perimeter) {
  if (!(area > 0.0) || !(perimeter > 0.0)) {
    throw Error(Errc::NonpositiveGeometry, "area and perimeter must be positive");
  }
  return 4.0 * std::numbers::pi * area / (perimeter * perimeter);
}

namespace {

struct Wasted {
  double dem = 0.0;
  double rep = 0.0;
};

Wasted wasted_votes(const DistrictStats& s, DistrictId d) {
  const double total = s.votes_dem + s.votes_rep;
  if (!(total > 0.0)) throw Error(Errc::ZeroVoteDistrict, std::to_string(d));
  if (s.votes_dem == s.votes_rep) throw Error(Errc::TiedDistrict, std::to_string(d));
  const double needed = total / 2.0 + 1.0;
  if (s.votes_dem > s.votes_rep) return {s.votes_dem - needed, s.votes_rep};
  return {s.votes_dem, s.votes_rep - needed};
}

}  // namespace

EfficiencyGap efficiency_gap(const Partition& partition) {
  const int k = partition.district_count();
  std::vector<Wasted> wasted(static_cast<std::size_t>(k));
  double total = 0.0;
  double wd = 0.0;
  double wr = 0.0;
  for (DistrictId d = 1; d <= k; ++d) {
    const auto& s = partition.district(d);
    wasted[static_cast<std::size_t>(d - 1)] = wasted_votes(s, d);
    total += s.votes_dem + s.votes_rep;
    wd += wasted[static_cast<std::size_t>(d - 1)].dem;
    wr += wasted[static_cast<std::size_t>(d - 1)].rep;
  }
  EfficiencyGap eg;
  eg.gap = (wd - wr) / total;
  eg.per_district.reserve(wasted.size());
  for (const auto& w : wasted) eg.per_district.push_back((w.dem - w.rep) / total);
  return eg;
}

SeatAllocation seat_allocation(const Partition& partition) {
  SeatAllocation seats;
  for (DistrictId d = 1; d <= partition.district_count(); ++d) {
    const auto& s = partition.district(d);
    if (s.votes_dem == s.votes_rep) throw Error(Errc::TiedDistrict, std::to_string(d));
    if (s.votes_dem > s.votes_rep) ++seats.dem;
  }
  seats.rep = partition.district_count() - seats.dem;
  return seats;
}

PlanMetrics score_plan(const Partition& partition, const UnitGraph& graph) {
  PlanMetrics m;
  const auto ir = interaction_ratio(partition, graph);
  m.ir = ir.ir;
  m.intra_flows = ir.intra;
  m.inter_flows = ir.inter;
  m.normalized_ir = ir.intra / (ir.intra + ir.inter);

  const int k = partition.district_count();
  m.per_district_pp.reserve(static_cast<std::size_t>(k));
  double pp_sum = 0.0;
  for (DistrictId d = 1; d <= k; ++d) {
    const auto geo = district_geometry(partition, d);
    m.per_district_pp.push_back(polsby_popper(geo.area, geo.perimeter));
    pp_sum += m.per_district_pp.back();
  }
  m.mean_polsby_popper = pp_sum / k;

  auto eg = efficiency_gap(partition);
  m.efficiency_gap = eg.gap;
  m.per_district_eg = std::move(eg.per_district);
  const auto seats = seat_allocation(partition);
  m.seats_dem = seats.dem;
  m.seats_rep = seats.rep;
  m.cut_edges = cut_edge_count(partition);
  return m;
}

void to_json(nlohmann::json& j, const PlanMetrics& m) {
  j = nlohmann::json{{"ir", m.ir},
                     {"normalized_ir", m.normalized_ir},
                     {"mean_polsby_popper", m.mean_polsby_popper},
                     {"per_district_pp", m.per_district_pp},
                     {"efficiency_gap", m.efficiency_gap},
                     {"seats_dem", m.seats_dem},
                     {"seats_rep", m.seats_rep},
                     {"per_district_eg", m.per_district_eg},
                     {"intra_flows", m.intra_flows},
                     {"inter_flows", m.inter_flows},
                     {"cut_edges", m.cut_edges}};
}

void from_json(const nlohmann::json& j, PlanMetrics& m) {
  j.at("ir").get_to(m.ir);
  j.at("normalized_ir").get_to(m.normalized_ir);
  j.at("mean_polsby_popper").get_to(m.mean_polsby_popper);
  j.at("per_district_pp").get_to(m.per_district_pp);
  j.at("efficiency_gap").get_to(m.efficiency_gap);
  j.at("seats_dem").get_to(m.seats_dem);
  j.at("seats_rep").get_to(m.seats_rep);
  j.at("per_district_eg").get_to(m.per_district_eg);
  j.at("intra_flows").get_to(m.intra_flows);
  j.at("inter_flows").get_to(m.inter_flows);
  j.at("cut_edges").get_to(m.cut_edges);
}

}  // namespace flowrecom
