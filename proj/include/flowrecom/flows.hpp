#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace flowrecom {

using OdKey = std::pair<std::string, std::string>;

// Sparse origin-destination matrix of population flows (persons/month).
// Self flows (o == d) are allowed. Entries are kept in key order so every
// traversal is deterministic.
class FlowMatrix {
 public:
  FlowMatrix() = default;

  // Accumulates; repeated (o, d) pairs sum. Throws InvalidNode on negative
  // or non-finite flow.
  void add(const std::string& origin, const std::string& destination, double flow);

  double at(const std::string& origin, const std::string& destination) const;
  const std::map<OdKey, double>& entries() const { return entries_; }
  double total_flow() const { return total_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const FlowMatrix&, const FlowMatrix&) = default;

 private:
  std::map<OdKey, double> entries_;
  double total_ = 0.0;
};

struct DeviceFlowRecord {
  std::string origin;
  std::string destination;
  double device_flows = 0.0;
};

struct OriginStats {
  std::string origin;
  long long pop = 0;
  long long num_devices = 0;
};

struct PartyVotes {
  double dem = 0.0;
  double rep = 0.0;
};

struct WardUnitWeight {
  std::string ward;
  std::string unit;
  double weight = 0.0;
};

// pop_flows(o, d) = device_flows(o, d) * pop(o) / num_devices(o).
FlowMatrix scale_flows(std::span<const DeviceFlowRecord> records,
                       const std::map<std::string, OriginStats>& stats);

// Entry-wise mean over months; a pair absent from a month counts as zero.
FlowMatrix monthly_average(std::span<const FlowMatrix> matrices);

// Unit votes = sum over wards of ward votes times overlap weight. Each ward's
// weights must sum to 1 within 1e-9.
std::map<std::string, PartyVotes> disaggregate_votes(
    const std::map<std::string, PartyVotes>& ward_votes,
    std::span<const WardUnitWeight> weights);

namespace io {

std::vector<DeviceFlowRecord> read_device_flows(const std::filesystem::path& path);
std::map<std::string, OriginStats> read_origin_stats(const std::filesystem::path& path);
FlowMatrix read_flow_matrix(const std::filesystem::path& path);
void write_flow_matrix(const FlowMatrix& flows, const std::filesystem::path& path);
std::map<std::string, PartyVotes> read_ward_votes(const std::filesystem::path& path);
std::vector<WardUnitWeight> read_weights(const std::filesystem::path& path);

}  // namespace io

}  // namespace flowrecom
