#pragma once

#include <span>
#include <vector>

#include "flowrecom/graph.hpp"
#include "json.hpp"

namespace flowrecom {

struct InteractionRatio {
  double ir = 0.0;
  double intra = 0.0;
  double inter = 0.0;
};

// Full pass over every O-D entry: intra collects pairs in the same district
// (self flows included), inter the rest. Throws ZeroInterFlows when inter is 0.
InteractionRatio interaction_ratio(const Partition& partition, const UnitGraph& graph);

struct FlowSums {
  double intra = 0.0;
  double inter = 0.0;
};

// Intra/inter sums after moving `nodes` to `labels` inside the merged pair
// (a, b). Only flows among the merged region change classification; flows
// from the merged region to any other district stay inter.
FlowSums ir_delta(const Partition& partition, const UnitGraph& graph, DistrictId a, DistrictId b,
                  std::span<const NodeIndex> nodes, std::span<const DistrictId> labels);

// 4*pi*area / perimeter^2.
double polsby_popper(double area, double perimeter);

struct EfficiencyGap {
  double gap = 0.0;
  std::vector<double> per_district;  // district d at index d - 1
};

// Wasted votes: every loser vote, and winner votes beyond total/2 + 1
// (real-valued, no flooring). gap = (wasted_D - wasted_R) / statewide total.
EfficiencyGap efficiency_gap(const Partition& partition);

struct SeatAllocation {
  int dem = 0;
  int rep = 0;
  friend bool operator==(const SeatAllocation&, const SeatAllocation&) = default;
};

SeatAllocation seat_allocation(const Partition& partition);

struct PlanMetrics {
  double ir = 0.0;
  double normalized_ir = 0.0;
  double mean_polsby_popper = 0.0;
  std::vector<double> per_district_pp;
  double efficiency_gap = 0.0;
  int seats_dem = 0;
  int seats_rep = 0;
  std::vector<double> per_district_eg;
  double intra_flows = 0.0;
  double inter_flows = 0.0;
  std::size_t cut_edges = 0;

  friend bool operator==(const PlanMetrics&, const PlanMetrics&) = default;
};

PlanMetrics score_plan(const Partition& partition, const UnitGraph& graph);

void to_json(nlohmann::json& j, const PlanMetrics& m);
void from_json(const nlohmann::json& j, PlanMetrics& m);

}  // namespace flowrecom
