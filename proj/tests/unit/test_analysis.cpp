#include <algorithm>
#include <map>

#include "doctest.h"
#include "flowrecom/analysis.hpp"
#include "flowrecom/error.hpp"
#include "flowrecom/rng.hpp"

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

PlanMetrics plan(double ir, double eg, int dem, int rep, double pp = 0.5) {
  PlanMetrics m;
  m.ir = ir;
  m.efficiency_gap = eg;
  m.seats_dem = dem;
  m.seats_rep = rep;
  m.mean_polsby_popper = pp;
  return m;
}

Ensemble ensemble(std::string label, std::vector<PlanMetrics> plans, std::string dataset = "d") {
  return {std::move(label), std::move(dataset), std::move(plans)};
}

// sup over pooled points of |F1(t) - F2(t)| with both ECDFs counted directly.
double ks_by_counting(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> grid(a);
  grid.insert(grid.end(), b.begin(), b.end());
  double best = 0.0;
  for (double t : grid) {
    double ca = 0;
    double cb = 0;
    for (double x : a) ca += x <= t;
    for (double x : b) cb += x <= t;
    best = std::max(best, std::abs(ca / a.size() - cb / b.size()));
  }
  return best;
}

// Sort-and-index quantile at position (n-1)p.
double quantile_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = (v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("summaries") {
  const std::vector<double> c(5, 3.5);
  const auto s = summarize(c);
  CHECK(s.min == 3.5);
  CHECK(s.max == 3.5);
  CHECK(s.mean == 3.5);
  CHECK(s.median == 3.5);

  const std::vector<double> v{4, 1, 3, 2};
  const auto q = summarize(v);
  CHECK(q.median == 2.5);
  CHECK(q.q1 == 1.75);
  CHECK(q.q3 == 3.25);
  CHECK(q.count == 4);
  CHECK(code_of([] { summarize(std::vector<double>{}); }) == Errc::EmptySample);
}

TEST_CASE("summaries of 1000 random values match sort-and-index") {
  Rng rng(3);
  std::vector<PlanMetrics> plans;
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) {
    v.push_back(rng.uniform() * 10);
    plans.push_back(plan(v.back(), 0, 1, 1));
  }
  const auto s = summarize(ensemble("a", plans), "ir");
  CHECK(s.min == *std::min_element(v.begin(), v.end()));
  CHECK(s.max == *std::max_element(v.begin(), v.end()));
  CHECK(s.q1 == doctest::Approx(quantile_oracle(v, 0.25)).epsilon(1e-14));
  CHECK(s.median == doctest::Approx(quantile_oracle(v, 0.5)).epsilon(1e-14));
  CHECK(s.q3 == doctest::Approx(quantile_oracle(v, 0.75)).epsilon(1e-14));
  double sum = 0;
  for (double x : v) sum += x;
  CHECK(s.mean == doctest::Approx(sum / 1000).epsilon(1e-12));
  CHECK(code_of([&] { summarize(ensemble("a", plans), "bogus"); }) == Errc::UnknownField);
}

TEST_CASE("ks extremes") {
  const std::vector<double> a{1, 2, 3, 3, 5};
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  const std::vector<double> b{6, 7, 8};
  CHECK(ks_two_sample(a, b).statistic == 1.0);
  CHECK(code_of([&] { ks_two_sample(a, std::vector<double>{}); }) == Errc::EmptySample);
}

TEST_CASE("ks statistic on 200-point samples matches direct counting") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    std::vector<double> a;
    std::vector<double> b;
    // Coarse rounding forces ties inside and across samples.
    for (int i = 0; i < 200; ++i) a.push_back(std::round(rng.uniform() * 50) / 10);
    for (int i = 0; i < 200; ++i) b.push_back(std::round((rng.uniform() + 0.1 * seed / 10) * 50) / 10);
    const auto r = ks_two_sample(a, b);
    CHECK(std::abs(r.statistic - ks_by_counting(a, b)) <= 1e-12);
    CHECK(r.n1 == 200);
    CHECK(r.n2 == 200);
  }
}

TEST_CASE("kolmogorov survival reference values") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-10));
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.2699996716773545).epsilon(1e-10));
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494853).epsilon(1e-6));
  CHECK(kolmogorov_survival(3.0) < 1e-7);
  // Continuous across the series switch.
  CHECK(std::abs(kolmogorov_survival(1.18 - 1e-9) - kolmogorov_survival(1.18 + 1e-9)) < 1e-8);
}

TEST_CASE("ks detects a shift") {
  Rng rng(8);
  std::vector<double> a;
  std::vector<double> b;
  for (int i = 0; i < 500; ++i) a.push_back(rng.uniform());
  for (int i = 0; i < 500; ++i) b.push_back(rng.uniform() + 0.2);
  CHECK(ks_two_sample(a, b).p_value < 0.01);
  std::vector<double> c;
  for (int i = 0; i < 500; ++i) c.push_back(rng.uniform());
  CHECK(ks_two_sample(a, c).p_value > 0.01);
}

TEST_CASE("seat bands") {
  const auto one = ensemble("a", {plan(1, 0.1, 4, 4), plan(1, 0.3, 4, 4)});
  const auto b1 = seat_bands(one);
  REQUIRE(b1.size() == 1);
  CHECK(b1[0].count == 2);

  const auto six = ensemble("a", {plan(1, 0.10, 3, 5), plan(1, -0.05, 4, 4), plan(1, 0.20, 3, 5),
                                  plan(1, 0.00, 5, 3), plan(1, -0.15, 4, 4), plan(1, 0.06, 3, 5)});
  const auto b = seat_bands(six);
  REQUIRE(b.size() == 3);
  CHECK(b[0].seats_dem == 3);
  CHECK(b[0].count == 3);
  CHECK(b[0].mean_efficiency_gap == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(b[1].seats_dem == 4);
  CHECK(b[1].count == 2);
  CHECK(b[1].mean_efficiency_gap == doctest::Approx(-0.10).epsilon(1e-12));
  CHECK(b[2].seats_dem == 5);
  CHECK(b[2].count == 1);
  CHECK(b[2].mean_efficiency_gap == 0.0);
}

TEST_CASE("seat bands match a group-by") {
  Rng rng(12);
  std::vector<PlanMetrics> plans;
  std::map<int, std::pair<std::size_t, double>> oracle;
  for (int i = 0; i < 400; ++i) {
    const int dem = static_cast<int>(rng.below(9));
    const double eg = rng.uniform() - 0.5;
    plans.push_back(plan(1, eg, dem, 8 - dem));
    oracle[dem].first += 1;
    oracle[dem].second += eg;
  }
  const auto bands = seat_bands(ensemble("r", plans));
  REQUIRE(bands.size() == oracle.size());
  for (const auto& band : bands) {
    const auto& [count, sum] = oracle.at(band.seats_dem);
    CHECK(band.count == count);
    CHECK(band.seats_rep == 8 - band.seats_dem);
    CHECK(band.mean_efficiency_gap == doctest::Approx(sum / count).epsilon(1e-12));
  }
}

TEST_CASE("point cloud") {
  const auto single = ensemble("s", {plan(2.5, -0.1, 1, 1, 0.3)});
  const std::vector<Ensemble> one{single};
  const auto rows = point_cloud(one);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].compactness == 0.3);
  CHECK(rows[0].efficiency_gap == -0.1);
  CHECK(rows[0].ir == 2.5);
  CHECK(rows[0].ensemble == "s");

  const std::vector<Ensemble> two{ensemble("a", std::vector<PlanMetrics>(10, plan(1, 0, 1, 1))),
                                  ensemble("b", std::vector<PlanMetrics>(20, plan(2, 0, 1, 1)))};
  const auto cloud = point_cloud(two);
  CHECK(cloud.size() == 30);
  CHECK(std::count_if(cloud.begin(), cloud.end(), [](const CloudRow& r) { return r.ensemble == "a"; }) == 10);
  CHECK(std::count_if(cloud.begin(), cloud.end(), [](const CloudRow& r) { return r.ensemble == "b"; }) == 20);
}

TEST_CASE("analysis document") {
  const std::vector<Ensemble> one{ensemble("a", {plan(1, 0.1, 1, 1), plan(2, 0.1, 1, 1)})};
  const auto doc1 = analyze(one);
  CHECK(doc1.at("ks").empty());
  CHECK(doc1.at("summaries").at("a").at("ir").at("mean") == 1.5);

  const std::vector<Ensemble> two{one[0], ensemble("b", {plan(3, 0.2, 2, 0)})};
  const auto doc2 = analyze(two);
  CHECK(doc2.at("ks").contains("a|b"));
  CHECK(doc2.at("ks").at("a|b").at("ir").at("statistic") == 1.0);
  CHECK(doc2.at("point_cloud").size() == 4);

  const std::vector<Ensemble> mixed{one[0], ensemble("c", {plan(1, 0, 1, 1)}, "other")};
  CHECK(code_of([&] { analyze(mixed); }) == Errc::DigestMismatch);
}

}
