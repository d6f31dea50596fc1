#include "flowrecom/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "flowrecom/error.hpp"

namespace flowrecom {

Ensemble make_ensemble(std::string label, std::string dataset,
                       std::span<const StepRecord> records) {
  Ensemble e{std::move(label), std::move(dataset), {}};
  for (const auto& r : records) {
    if (r.accepted && r.metrics) e.plans.push_back(*r.metrics);
  }
  if (e.plans.empty()) throw Error(Errc::EmptySample, "ensemble " + e.label + " has no plans");
  return e;
}

Ensemble read_ensemble(const std::filesystem::path& path, std::string label) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  Ensemble e{std::move(label), {}, {}};
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
    const auto dataset = j.value("dataset", std::string());
    if (first) {
      e.dataset = dataset;
      first = false;
    } else if (dataset != e.dataset) {
      throw Error(Errc::DigestMismatch, path.string() + ":" + std::to_string(line_no) +
                                            ": record from a different dataset");
    }
    StepRecord r;
    try {
      r = record_from_json(j);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
    if (r.accepted && r.metrics) e.plans.push_back(std::move(*r.metrics));
  }
  if (e.plans.empty()) throw Error(Errc::EmptySample, path.string() + " holds no accepted records");
  return e;
}

namespace {

constexpr std::array<std::string_view, 9> kFields = {
    "ir",           "normalized_ir", "mean_polsby_popper", "efficiency_gap", "seats_dem",
    "seats_rep",    "intra_flows",   "inter_flows",        "cut_edges"};

double field_value(const PlanMetrics& m, std::string_view f) {
  if (f == "ir") return m.ir;
  if (f == "normalized_ir") return m.normalized_ir;
  if (f == "mean_polsby_popper") return m.mean_polsby_popper;
  if (f == "efficiency_gap") return m.efficiency_gap;
  if (f == "seats_dem") return m.seats_dem;
  if (f == "seats_rep") return m.seats_rep;
  if (f == "intra_flows") return m.intra_flows;
  if (f == "inter_flows") return m.inter_flows;
  if (f == "cut_edges") return static_cast<double>(m.cut_edges);
  throw Error(Errc::UnknownField, std::string(f));
}

double quantile_sorted(const std::vector<double>& x, double p) {
  const double h = static_cast<double>(x.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

}  // namespace

std::span<const std::string_view> metric_fields() { return kFields; }

std::vector<double> metric_values(const Ensemble& ensemble, std::string_view field) {
  if (std::find(kFields.begin(), kFields.end(), field) == kFields.end()) {
    throw Error(Errc::UnknownField, std::string(field));
  }
  std::vector<double> out;
  out.reserve(ensemble.plans.size());
  for (const auto& m : ensemble.plans) out.push_back(field_value(m, field));
  return out;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "summarize of an empty sample");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  Summary s;
  s.count = x.size();
  s.min = x.front();
  s.max = x.back();
  s.q1 = quantile_sorted(x, 0.25);
  s.median = quantile_sorted(x, 0.5);
  s.q3 = quantile_sorted(x, 0.75);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  return s;
}

Summary summarize(const Ensemble& ensemble, std::string_view field) {
  return summarize(metric_values(ensemble, field));
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form of the CDF converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::EmptySample, "ks_two_sample needs two samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n1 = static_cast<double>(x.size());
  const auto n2 = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  KSResult r;
  r.statistic = d;
  r.n1 = x.size();
  r.n2 = y.size();
  r.p_value = kolmogorov_survival(std::sqrt(n1 * n2 / (n1 + n2)) * d);
  return r;
}

std::vector<SeatBand> seat_bands(const Ensemble& ensemble) {
  std::map<std::pair<int, int>, std::pair<std::size_t, double>> groups;
  for (const auto& m : ensemble.plans) {
    auto& g = groups[{m.seats_dem, m.seats_rep}];
    ++g.first;
    g.second += m.efficiency_gap;
  }
  std::vector<SeatBand> out;
  for (const auto& [seats, g] : groups) {
    out.push_back({seats.first, seats.second, g.first, g.second / static_cast<double>(g.first)});
  }
  return out;
}

std::vector<CloudRow> point_cloud(std::span<const Ensemble> ensembles) {
  std::vector<CloudRow> rows;
  for (const auto& e : ensembles) {
    for (const auto& m : e.plans) {
      rows.push_back({m.mean_polsby_popper, m.efficiency_gap, m.ir, e.label});
    }
  }
  return rows;
}

void require_same_dataset(std::span<const Ensemble> ensembles) {
  for (const auto& e : ensembles) {
    if (e.dataset != ensembles.front().dataset) {
      throw Error(Errc::DigestMismatch, "ensembles " + ensembles.front().label + " and " +
                                            e.label + " come from different datasets");
    }
  }
}

nlohmann::json analyze(std::span<const Ensemble> ensembles) {
  if (ensembles.empty()) throw Error(Errc::EmptySample, "no ensembles to analyze");
  require_same_dataset(ensembles);
  nlohmann::json doc;
  doc["dataset"] = ensembles.front().dataset;

  auto& summaries = doc["summaries"] = nlohmann::json::object();
  for (const auto& e : ensembles) {
    auto& per = summaries[e.label] = nlohmann::json::object();
    for (const auto field : metric_fields()) {
      const auto s = summarize(e, field);
      per[std::string(field)] = {{"count", s.count}, {"min", s.min},       {"q1", s.q1},
                                 {"median", s.median}, {"q3", s.q3},     {"max", s.max},
                                 {"mean", s.mean}};
    }
  }

  auto& ks = doc["ks"] = nlohmann::json::object();
  for (std::size_t i = 0; i < ensembles.size(); ++i) {
    for (std::size_t j = i + 1; j < ensembles.size(); ++j) {
      auto& pair = ks[ensembles[i].label + "|" + ensembles[j].label] = nlohmann::json::object();
      for (const auto field : {"ir", "mean_polsby_popper", "efficiency_gap"}) {
        const auto r = ks_two_sample(metric_values(ensembles[i], field),
                                     metric_values(ensembles[j], field));
        pair[field] = {{"statistic", r.statistic}, {"p_value", r.p_value},
                       {"n1", r.n1},               {"n2", r.n2}};
      }
    }
  }

  auto& bands = doc["seat_bands"] = nlohmann::json::array();
  for (const auto& e : ensembles) {
    for (const auto& b : seat_bands(e)) {
      bands.push_back({{"ensemble", e.label},
                       {"seats_dem", b.seats_dem},
                       {"seats_rep", b.seats_rep},
                       {"count", b.count},
                       {"mean_efficiency_gap", b.mean_efficiency_gap}});
    }
  }

  auto& cloud = doc["point_cloud"] = nlohmann::json::array();
  cloud.push_back({"compactness", "efficiency_gap", "ir", "ensemble"});
  for (const auto& row : point_cloud(ensembles)) {
    cloud.push_back({row.compactness, row.efficiency_gap, row.ir, row.ensemble});
  }
  return doc;
}

}  // namespace flowrecom
