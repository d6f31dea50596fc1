#include "flowrecom/flows.hpp"

#include <cmath>
#include <fstream>

#include "flowrecom/csv.hpp"
#include "flowrecom/error.hpp"

namespace flowrecom {

void FlowMatrix::add(const std::string& origin, const std::string& destination, double flow) {
  if (!(flow >= 0.0) || !std::isfinite(flow)) {
    throw Error(Errc::InvalidNode, "flow " + origin + "->" + destination +
                                       " must be finite and nonnegative");
  }
  entries_[{origin, destination}] += flow;
  total_ += flow;
}

double FlowMatrix::at(const std::string& origin, const std::string& destination) const {
  const auto it = entries_.find({origin, destination});
  return it == entries_.end() ? 0.0 : it->second;
}

FlowMatrix scale_flows(std::span<const DeviceFlowRecord> records,
                       const std::map<std::string, OriginStats>& stats) {
  FlowMatrix out;
  for (const auto& r : records) {
    const auto it = stats.find(r.origin);
    if (it == stats.end()) throw Error(Errc::MissingOriginStats, r.origin);
    if (it->second.num_devices <= 0) throw Error(Errc::ZeroDevices, r.origin);
    const double ratio = static_cast<double>(it->second.pop) /
                         static_cast<double>(it->second.num_devices);
    out.add(r.origin, r.destination, r.device_flows * ratio);
  }
  return out;
}

FlowMatrix monthly_average(std::span<const FlowMatrix> matrices) {
  if (matrices.empty()) throw Error(Errc::EmptyList, "monthly_average needs at least one matrix");
  std::map<OdKey, double> sums;
  for (const auto& m : matrices) {
    for (const auto& [key, v] : m.entries()) sums[key] += v;
  }
  const auto months = static_cast<double>(matrices.size());
  FlowMatrix out;
  for (const auto& [key, v] : sums) out.add(key.first, key.second, v / months);
  return out;
}

std::map<std::string, PartyVotes> disaggregate_votes(
    const std::map<std::string, PartyVotes>& ward_votes,
    std::span<const WardUnitWeight> weights) {
  std::map<std::string, double> weight_sums;
  for (const auto& w : weights) {
    if (w.weight < 0.0) throw Error(Errc::NegativeWeight, w.ward + "/" + w.unit);
    weight_sums[w.ward] += w.weight;
  }
  for (const auto& [ward, votes] : ward_votes) {
    const auto it = weight_sums.find(ward);
    const double s = it == weight_sums.end() ? 0.0 : it->second;
    if (std::abs(s - 1.0) > 1e-9) {
      throw Error(Errc::WeightsNotNormalized, ward + " weights sum to " + csv::format_double(s));
    }
  }
  for (const auto& [ward, s] : weight_sums) {
    if (std::abs(s - 1.0) > 1e-9) {
      throw Error(Errc::WeightsNotNormalized, ward + " weights sum to " + csv::format_double(s));
    }
  }
  std::map<std::string, PartyVotes> out;
  for (const auto& w : weights) {
    const auto it = ward_votes.find(w.ward);
    auto& unit = out[w.unit];
    if (it == ward_votes.end()) continue;
    unit.dem += it->second.dem * w.weight;
    unit.rep += it->second.rep * w.weight;
  }
  return out;
}

namespace io {

std::vector<DeviceFlowRecord> read_device_flows(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(t, {"origin", "destination", "device_flows"});
  std::vector<DeviceFlowRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double f = csv::to_double(t, i, 2);
    if (f < 0.0) {
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(t.line_numbers[i]) +
                                        ": negative device_flows");
    }
    out.push_back({t.rows[i][0], t.rows[i][1], f});
  }
  return out;
}

std::map<std::string, OriginStats> read_origin_stats(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(t, {"origin", "pop", "num_devices"});
  std::map<std::string, OriginStats> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    OriginStats s{t.rows[i][0], csv::to_int(t, i, 1), csv::to_int(t, i, 2)};
    if (!out.emplace(s.origin, s).second) {
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(t.line_numbers[i]) +
                                        ": duplicate origin " + s.origin);
    }
  }
  return out;
}

FlowMatrix read_flow_matrix(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(t, {"origin", "destination", "flow"});
  FlowMatrix m;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double f = csv::to_double(t, i, 2);
    if (f < 0.0) {
      throw Error(Errc::ParseError,
                  path.string() + ":" + std::to_string(t.line_numbers[i]) + ": negative flow");
    }
    m.add(t.rows[i][0], t.rows[i][1], f);
  }
  return m;
}

void write_flow_matrix(const FlowMatrix& flows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << "origin,destination,flow\n";
  for (const auto& [key, v] : flows.entries()) {
    out << key.first << ',' << key.second << ',' << csv::format_double(v) << '\n';
  }
}

std::map<std::string, PartyVotes> read_ward_votes(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(t, {"ward", "votes_dem", "votes_rep"});
  std::map<std::string, PartyVotes> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto& v = out[t.rows[i][0]];
    v.dem += csv::to_double(t, i, 1);
    v.rep += csv::to_double(t, i, 2);
  }
  return out;
}

std::vector<WardUnitWeight> read_weights(const std::filesystem::path& path) {
  const auto t = csv::read_file(path);
  csv::require_header(t, {"ward", "unit", "weight"});
  std::vector<WardUnitWeight> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({t.rows[i][0], t.rows[i][1], csv::to_double(t, i, 2)});
  }
  return out;
}

}  // namespace io
}  // namespace flowrecom
