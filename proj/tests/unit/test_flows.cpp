#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "doctest.h"
#include "flowrecom/error.hpp"
#include "flowrecom/flows.hpp"
#include "flowrecom/rng.hpp"

using namespace flowrecom;

namespace {

std::string node_name(std::uint64_t i) { return "u" + std::to_string(i); }

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::IoError;
}

}  // namespace

TEST_SUITE("flows") {

TEST_CASE("scale_flows substitutes directly") {
  const std::map<std::string, OriginStats> stats{{"a", {"a", 1000, 100}}};
  const std::vector<DeviceFlowRecord> recs{{"a", "b", 10.0}, {"a", "c", 0.0}};
  const auto m = scale_flows(recs, stats);
  CHECK(m.at("a", "b") == 100.0);
  CHECK(m.at("a", "c") == 0.0);
}

TEST_CASE("scale_flows errors") {
  const std::vector<DeviceFlowRecord> recs{{"a", "b", 1.0}};
  CHECK(code_of([&] { scale_flows(recs, {}); }) == Errc::MissingOriginStats);
  const std::map<std::string, OriginStats> zero{{"a", {"a", 10, 0}}};
  CHECK(code_of([&] { scale_flows(recs, zero); }) == Errc::ZeroDevices);
}

TEST_CASE("scale_flows matches a group-by-sum") {
  Rng rng(5);
  std::map<std::string, OriginStats> stats;
  for (std::uint64_t i = 0; i < 6; ++i) {
    stats[node_name(i)] = {node_name(i), static_cast<long long>(100 + rng.below(900)),
                           static_cast<long long>(1 + rng.below(50))};
  }
  std::vector<DeviceFlowRecord> recs;
  for (int i = 0; i < 50; ++i) {
    recs.push_back({node_name(rng.below(6)), node_name(rng.below(6)), static_cast<double>(rng.below(30))});
  }
  std::unordered_map<std::string, double> oracle;
  for (const auto& r : recs) {
    const auto& s = stats.at(r.origin);
    oracle[r.origin + "|" + r.destination] +=
        r.device_flows * static_cast<double>(s.pop) / static_cast<double>(s.num_devices);
  }
  const auto m = scale_flows(recs, stats);
  CHECK(m.size() == oracle.size());
  for (const auto& [key, v] : m.entries()) {
    CHECK(v == doctest::Approx(oracle.at(key.first + "|" + key.second)).epsilon(1e-12));
  }
}

TEST_CASE("monthly_average") {
  FlowMatrix a;
  a.add("x", "y", 8.0);
  const std::vector<FlowMatrix> one{a};
  CHECK(monthly_average(one) == a);
  const std::vector<FlowMatrix> two{a, FlowMatrix{}};
  CHECK(monthly_average(two).at("x", "y") == 4.0);
  CHECK(code_of([] { monthly_average(std::vector<FlowMatrix>{}); }) == Errc::EmptyList);
}

TEST_CASE("monthly_average matches a dense mean") {
  Rng rng(17);
  constexpr int n = 7;
  std::vector<FlowMatrix> months(12);
  std::vector<double> dense(n * n, 0.0);
  for (auto& m : months) {
    for (int k = 0; k < 10; ++k) {
      const auto o = rng.below(n);
      const auto d = rng.below(n);
      const double v = static_cast<double>(rng.below(100));
      m.add(node_name(o), node_name(d), v);
      dense[o * n + d] += v;
    }
  }
  const auto avg = monthly_average(months);
  for (std::uint64_t o = 0; o < n; ++o) {
    for (std::uint64_t d = 0; d < n; ++d) {
      CHECK(avg.at(node_name(o), node_name(d)) ==
            doctest::Approx(dense[o * n + d] / 12.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("disaggregate_votes splits proportionally") {
  const std::map<std::string, PartyVotes> wards{{"w", {100, 50}}};
  const std::vector<WardUnitWeight> w{{"w", "u1", 0.6}, {"w", "u2", 0.4}};
  const auto out = disaggregate_votes(wards, w);
  CHECK(out.at("u1").dem == doctest::Approx(60));
  CHECK(out.at("u1").rep == doctest::Approx(30));
  CHECK(out.at("u2").dem == doctest::Approx(40));
  CHECK(out.at("u2").rep == doctest::Approx(20));
  const std::vector<WardUnitWeight> whole{{"w", "u", 1.0}};
  CHECK(disaggregate_votes(wards, whole).at("u").dem == 100.0);
  CHECK(disaggregate_votes(wards, whole).at("u").rep == 50.0);
}

TEST_CASE("disaggregate_votes errors") {
  const std::map<std::string, PartyVotes> wards{{"w", {100, 50}}};
  const std::vector<WardUnitWeight> partial{{"w", "u1", 0.5}};
  CHECK(code_of([&] { disaggregate_votes(wards, partial); }) == Errc::WeightsNotNormalized);
  const std::vector<WardUnitWeight> neg{{"w", "u1", 1.5}, {"w", "u2", -0.5}};
  CHECK(code_of([&] { disaggregate_votes(wards, neg); }) == Errc::NegativeWeight);
}

TEST_CASE("disaggregate_votes matches a matrix product and conserves totals") {
  Rng rng(23);
  constexpr int wards_n = 5;
  constexpr int units_n = 8;
  std::map<std::string, PartyVotes> wards;
  double w[wards_n][units_n];
  std::vector<WardUnitWeight> weights;
  for (int i = 0; i < wards_n; ++i) {
    const auto name = "w" + std::to_string(i);
    wards[name] = {static_cast<double>(rng.below(1000)), static_cast<double>(rng.below(1000))};
    double sum = 0.0;
    for (int j = 0; j < units_n; ++j) sum += (w[i][j] = rng.uniform());
    for (int j = 0; j < units_n; ++j) {
      w[i][j] /= sum;
      weights.push_back({name, node_name(j), w[i][j]});
    }
  }
  const auto out = disaggregate_votes(wards, weights);
  double dem_total = 0.0;
  double rep_total = 0.0;
  for (int j = 0; j < units_n; ++j) {
    double dem = 0.0;
    double rep = 0.0;
    for (int i = 0; i < wards_n; ++i) {
      dem += w[i][j] * wards.at("w" + std::to_string(i)).dem;
      rep += w[i][j] * wards.at("w" + std::to_string(i)).rep;
    }
    CHECK(out.at(node_name(j)).dem == doctest::Approx(dem).epsilon(1e-12));
    CHECK(out.at(node_name(j)).rep == doctest::Approx(rep).epsilon(1e-12));
    dem_total += out.at(node_name(j)).dem;
    rep_total += out.at(node_name(j)).rep;
  }
  double dem_in = 0.0;
  double rep_in = 0.0;
  for (const auto& [k, v] : wards) {
    dem_in += v.dem;
    rep_in += v.rep;
  }
  CHECK(dem_total == doctest::Approx(dem_in).epsilon(1e-12));
  CHECK(rep_total == doctest::Approx(rep_in).epsilon(1e-12));
}

TEST_CASE("negative flows are refused") {
  FlowMatrix m;
  CHECK(code_of([&] { m.add("a", "b", -1.0); }) == Errc::InvalidNode);
}

TEST_CASE("flow matrix csv round trip") {
  const auto dir = std::filesystem::path(FLOWRECOM_TEST_TMP) / "flows_io";
  std::filesystem::create_directories(dir);
  FlowMatrix m;
  m.add("a", "b", 0.1);
  m.add("b", "a", 1.0 / 3.0);
  m.add("a", "a", 5.0);
  io::write_flow_matrix(m, dir / "m.csv");
  CHECK(io::read_flow_matrix(dir / "m.csv").entries() == m.entries());
}

TEST_CASE("csv parse errors carry a line number") {
  const auto dir = std::filesystem::path(FLOWRECOM_TEST_TMP) / "flows_io";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.csv") << "origin,destination,flow\na,b,1\na,c,notanumber\n";
  try {
    io::read_flow_matrix(dir / "bad.csv");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
}

}
