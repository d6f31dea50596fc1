#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "flowrecom/error.hpp"
#include "flowrecom/metrics.hpp"
#include "flowrecom/recom.hpp"
#include "oracles.hpp"

using namespace flowrecom;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::IoError;
}

// Two districts on a 1x2 path with the given (dem, rep) totals.
struct TwoDistricts {
  UnitGraph graph;
  Partition plan;
};

TwoDistricts two_districts(std::pair<double, double> left, std::pair<double, double> right) {
  fixtures::GridSpec spec;
  spec.rows = 1;
  spec.cols = 2;
  spec.votes = [=](int, int c) { return c == 0 ? left : right; };
  FlowMatrix m;
  m.add("r0c0", "r0c1", 1.0);
  auto g = fixtures::grid_graph(spec, m);
  auto p = Partition::from_assignment(g, {1, 2});
  return {std::move(g), std::move(p)};
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("worked example gives IR 40/32") {
  const auto ex = fixtures::worked_example();
  const auto p = Partition::from_assignment(ex.graph, ex.labels);
  const auto r = interaction_ratio(p, ex.graph);
  CHECK(r.intra == 40.0);
  CHECK(r.inter == 32.0);
  CHECK(r.ir == 1.25);
  const auto m = score_plan(p, ex.graph);
  CHECK(m.ir == 1.25);
  CHECK(m.normalized_ir == doctest::Approx(1.25 / 2.25).epsilon(1e-15));
}

TEST_CASE("single district has no inter flow") {
  const auto ex = fixtures::worked_example();
  const auto p = Partition::from_assignment(ex.graph, std::vector<DistrictId>(8, 1));
  CHECK(code_of([&] { interaction_ratio(p, ex.graph); }) == Errc::ZeroInterFlows);
}

TEST_CASE("IR on random bipartitions matches pair classification") {
  const auto g = fixtures::grid_graph({}, fixtures::random_flows(4, 4, 31));
  std::vector<NodeIndex> all(g.node_count());
  std::iota(all.begin(), all.end(), 0);
  Rng rng(8);
  for (int t = 0; t < 40; ++t) {
    const auto tree = build_tree(all, g, ProposalConfig{}, rng);
    const auto child = static_cast<std::uint32_t>(1 + rng.below(g.node_count() - 1));
    const auto labels = induced_assignment(tree, {tree.parent_edge[child], child, 0}, 1, 2);
    const auto p = Partition::from_assignment(g, labels);
    const auto r = interaction_ratio(p, g);
    const auto o = oracles::ir_by_pairs(g, labels);
    CHECK(oracles::relative_error(r.intra, o.intra) < 1e-12);
    CHECK(oracles::relative_error(r.inter, o.inter) < 1e-12);
    CHECK(oracles::relative_error(p.intra_flow_sum(), o.intra) < 1e-12);
  }
}

TEST_CASE("ir_delta identity and limiting proposals") {
  const auto g = fixtures::grid_graph({}, fixtures::random_flows(4, 4, 2));
  const auto labels = fixtures::grid_labels(4, 4, [](int r, int c) { return 1 + (c >= 2) + 2 * (r >= 2); });
  const auto p = Partition::from_assignment(g, labels);
  auto region = p.members(1);
  const auto m2 = p.members(2);
  region.insert(region.end(), m2.begin(), m2.end());
  std::sort(region.begin(), region.end());
  std::vector<DistrictId> same;
  for (auto n : region) same.push_back(labels[n]);
  const auto id = ir_delta(p, g, 1, 2, region, same);
  CHECK(id.intra == p.intra_flow_sum());
  CHECK(id.inter == p.inter_flow_sum());

  const std::vector<DistrictId> all_a(region.size(), 1);
  const auto merged = ir_delta(p, g, 1, 2, region, all_a);
  auto expect = labels;
  for (auto n : region) expect[n] = 1;
  const auto o = oracles::ir_by_pairs(g, expect);
  CHECK(oracles::relative_error(merged.intra, o.intra) < 1e-12);
  CHECK(oracles::relative_error(merged.inter, o.inter) < 1e-12);
}

TEST_CASE("ir_delta matches full recomputation over 500 proposals") {
  fixtures::GridSpec spec;
  spec.rows = spec.cols = 6;
  const auto g = fixtures::grid_graph(spec, fixtures::random_flows(6, 6, 77, 0.2));
  const auto labels = fixtures::grid_labels(6, 6, [](int r, int c) { return 1 + (c >= 3) + 2 * (r >= 3); });
  auto p = Partition::from_assignment(g, labels);
  ProposalConfig cfg;
  cfg.epsilon = 0.2;
  int checked = 0;
  for (std::uint64_t s = 0; checked < 500; ++s) {
    Rng rng(s);
    const auto [a, b] = select_merge_pair(p, g, rng);
    auto region = p.members(a);
    const auto mb = p.members(b);
    region.insert(region.end(), mb.begin(), mb.end());
    std::sort(region.begin(), region.end());
    const auto tree = build_tree(region, g, cfg, rng);
    const double ideal = static_cast<double>(p.district(a).population + p.district(b).population) / 2.0;
    const auto cuts = enumerate_balanced_cuts(tree, g, cfg.epsilon, ideal);
    if (cuts.empty()) continue;
    const auto& cut = cuts[rng.below(cuts.size())];
    const auto root_label = p.district_of(region.front());
    const auto other = root_label == a ? b : a;
    const auto local = induced_assignment(tree, cut, root_label, other);
    const auto delta = ir_delta(p, g, a, b, tree.nodes, local);
    auto next = std::vector<DistrictId>(p.assignment().begin(), p.assignment().end());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) next[tree.nodes[i]] = local[i];
    const auto o = oracles::ir_by_pairs(g, next);
    CHECK(oracles::relative_error(delta.intra, o.intra) < 1e-9);
    CHECK(oracles::relative_error(delta.inter, o.inter) < 1e-9);
    p.reassign(g, a, b, tree.nodes, local);
    ++checked;
  }
}

TEST_CASE("polsby_popper") {
  CHECK(polsby_popper(std::numbers::pi, 2 * std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(polsby_popper(1.0, 4.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
  CHECK(polsby_popper(2.0, 6.0) == doctest::Approx(2 * std::numbers::pi / 9).epsilon(1e-12));
  CHECK(code_of([] { polsby_popper(0.0, 1.0); }) == Errc::NonpositiveGeometry);
  CHECK(code_of([] { polsby_popper(1.0, -1.0); }) == Errc::NonpositiveGeometry);
}

TEST_CASE("efficiency gap: mirrored districts cancel") {
  const auto t = two_districts({60, 40}, {40, 60});
  CHECK(efficiency_gap(t.plan).gap == 0.0);
  CHECK(seat_allocation(t.plan) == SeatAllocation{1, 1});
  const auto both = two_districts({60, 40}, {70, 30});
  CHECK(seat_allocation(both.plan) == SeatAllocation{2, 0});
}

TEST_CASE("efficiency gap: single district 75/25") {
  fixtures::GridSpec spec;
  spec.rows = 1;
  spec.cols = 2;
  spec.votes = [](int, int c) { return c == 0 ? std::pair{40.0, 10.0} : std::pair{35.0, 15.0}; };
  const auto g = fixtures::grid_graph(spec, {});
  const auto p = Partition::from_assignment(g, {1, 1});
  const auto eg = efficiency_gap(p);
  CHECK(eg.gap == doctest::Approx(-0.01).epsilon(1e-15));
  REQUIRE(eg.per_district.size() == 1);
  CHECK(eg.per_district[0] == doctest::Approx(-0.01).epsilon(1e-15));
}

TEST_CASE("efficiency gap errors") {
  CHECK(code_of([] { efficiency_gap(two_districts({50, 50}, {40, 60}).plan); }) == Errc::TiedDistrict);
  CHECK(code_of([] { efficiency_gap(two_districts({0, 0}, {40, 60}).plan); }) == Errc::ZeroVoteDistrict);
}

TEST_CASE("efficiency gap and seats on 8 random districts match a tally") {
  fixtures::GridSpec spec;
  spec.rows = 2;
  spec.cols = 8;
  Rng votes_rng(4);
  std::vector<std::pair<double, double>> v;
  for (int i = 0; i < 16; ++i) {
    v.emplace_back(static_cast<double>(votes_rng.below(500)) + 0.25, static_cast<double>(votes_rng.below(500)));
  }
  spec.votes = [&](int r, int c) { return v[static_cast<std::size_t>(r * 8 + c)]; };
  const auto g = fixtures::grid_graph(spec, {});
  const auto labels = fixtures::grid_labels(2, 8, [](int, int c) { return c + 1; });
  const auto p = Partition::from_assignment(g, labels);
  const auto o = oracles::efficiency_gap(g, labels);
  CHECK(efficiency_gap(p).gap == doctest::Approx(o.gap).epsilon(1e-12));
  CHECK(seat_allocation(p) == SeatAllocation{o.seats_dem, o.seats_rep});
}

TEST_CASE("score_plan fields match the standalone operations") {
  const auto g = fixtures::grid_graph({}, fixtures::random_flows(4, 4, 9));
  const auto labels = fixtures::grid_labels(4, 4, [](int r, int c) { return 1 + (c >= 2) + 2 * (r >= 2); });
  const auto p = Partition::from_assignment(g, labels);
  const auto m = score_plan(p, g);
  CHECK(m == score_plan(p, g));
  const auto ir = interaction_ratio(p, g);
  CHECK(m.ir == ir.ir);
  CHECK(m.intra_flows == ir.intra);
  CHECK(m.inter_flows == ir.inter);
  CHECK(m.efficiency_gap == efficiency_gap(p).gap);
  CHECK(m.cut_edges == oracles::cut_count(g, labels));
  double pp = 0.0;
  for (DistrictId d = 1; d <= 4; ++d) {
    const double expect = polsby_popper(4.0, oracles::grid_boundary(4, 4, labels, d));
    CHECK(m.per_district_pp[static_cast<std::size_t>(d - 1)] == doctest::Approx(expect).epsilon(1e-15));
    pp += expect;
  }
  CHECK(m.mean_polsby_popper == doctest::Approx(pp / 4).epsilon(1e-15));
  const auto seats = seat_allocation(p);
  CHECK(m.seats_dem == seats.dem);
  CHECK(m.seats_rep == seats.rep);
}

TEST_CASE("metrics json round trip is exact") {
  const auto g = fixtures::grid_graph({}, fixtures::random_flows(4, 4, 10));
  const auto p = Partition::from_assignment(
      g, fixtures::grid_labels(4, 4, [](int, int c) { return c < 2 ? 1 : 2; }));
  const auto m = score_plan(p, g);
  const nlohmann::json j = m;
  CHECK(nlohmann::json::parse(j.dump()).get<PlanMetrics>() == m);
}

TEST_CASE("IR is invariant to relabelling districts") {
  const auto g = fixtures::grid_graph({}, fixtures::random_flows(4, 4, 12));
  const auto a = fixtures::grid_labels(4, 4, [](int r, int c) { return 1 + (c >= 2) + 2 * (r >= 2); });
  auto b = a;
  for (auto& d : b) d = 5 - d;
  CHECK(interaction_ratio(Partition::from_assignment(g, a), g).ir ==
        interaction_ratio(Partition::from_assignment(g, b), g).ir);
}

}
