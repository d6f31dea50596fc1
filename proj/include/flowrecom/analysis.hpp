#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowrecom/chain.hpp"
#include "json.hpp"

namespace flowrecom {

// Accepted records of one chain (seed plan included), all from one dataset.
struct Ensemble {
  std::string label;
  std::string dataset;
  std::vector<PlanMetrics> plans;
};

// Keeps accepted records only; EmptySample if none.
Ensemble make_ensemble(std::string label, std::string dataset,
                       std::span<const StepRecord> records);
// Reads a JSONL record stream; DigestMismatch if lines disagree on dataset.
Ensemble read_ensemble(const std::filesystem::path& path, std::string label);

// Scalar PlanMetrics field names accepted by metric_values / summarize.
std::span<const std::string_view> metric_fields();
std::vector<double> metric_values(const Ensemble& ensemble, std::string_view field);

struct Summary {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

// Quantiles interpolate linearly between order statistics at (n-1)p.
Summary summarize(std::span<const double> values);
Summary summarize(const Ensemble& ensemble, std::string_view field);

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// Exact sup |F1 - F2| over the pooled points; asymptotic p-value at
// lambda = sqrt(n1 n2 / (n1 + n2)) * D.
KSResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct SeatBand {
  int seats_dem = 0;
  int seats_rep = 0;
  std::size_t count = 0;
  double mean_efficiency_gap = 0.0;
};

std::vector<SeatBand> seat_bands(const Ensemble& ensemble);

struct CloudRow {
  double compactness = 0.0;
  double efficiency_gap = 0.0;
  double ir = 0.0;
  std::string ensemble;
};

std::vector<CloudRow> point_cloud(std::span<const Ensemble> ensembles);

// Throws DigestMismatch unless every ensemble shares one dataset.
void require_same_dataset(std::span<const Ensemble> ensembles);

// Full analysis document: summaries, pairwise KS, seat bands, point cloud.
nlohmann::json analyze(std::span<const Ensemble> ensembles);

}  // namespace flowrecom
