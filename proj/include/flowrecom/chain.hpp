#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flowrecom/graph.hpp"
#include "flowrecom/metrics.hpp"
#include "flowrecom/recom.hpp"
#include "json.hpp"

namespace flowrecom {

struct ChainConfig {
  std::string label;
  ProposalConfig proposal;
  std::size_t steps = 1;
  double compactness_multiplier = 1.0;
  std::uint64_t seed = 0;
  Partition initial_plan;
  std::size_t record_assignments_every = 0;  // 0 = metrics only

  void validate() const;  // throws InvalidConfig
};

enum class Rejection { CompactnessBound, RetriesExhausted };

std::string_view rejection_name(Rejection r);

struct StepRecord {
  std::size_t step = 0;     // accepted-step index; 0 is the seed plan
  std::size_t attempt = 0;  // draw index within the step
  bool accepted = false;
  std::optional<Rejection> rejection;
  std::optional<PlanMetrics> metrics;
  std::optional<std::vector<DistrictId>> assignment;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

// JSON Lines form. `dataset` is the dataset fingerprint stamped on each line
// so ensembles from different inputs can be told apart.
nlohmann::json record_to_json(const StepRecord& record, const std::string& dataset);
StepRecord record_from_json(const nlohmann::json& j);

// Resumable chain state. Every draw uses Rng::derive(seed, step, attempt),
// so this is all that is needed to continue a run exactly.
struct ChainState {
  ChainConfig config;
  std::string dataset;
  Partition current;
  std::size_t initial_cut_edges = 0;
  std::size_t next_step = 0;  // 0 until the seed record has been emitted
  std::size_t attempt = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

class Chain {
 public:
  // Validates the config and seed plan (InvalidSeedPlan on a bad plan).
  Chain(ChainConfig config, const UnitGraph& graph);
  Chain(ChainState state, const UnitGraph& graph);

  bool done() const { return state_.next_step > state_.config.steps; }
  // Produces the next record: the seed plan first, then one record per
  // attempt. Throws StepStalled when a step exceeds max_tree_retries attempts.
  StepRecord next();

  const ChainState& state() const { return state_; }
  const Partition& current() const { return state_.current; }
  std::string state_hash() const;

 private:
  StepRecord accepted_record();

  const UnitGraph* graph_;
  ChainState state_;
};

// Runs to completion, handing each record to `sink` in order.
void run_chain(const ChainConfig& config, const UnitGraph& graph,
               const std::function<void(const StepRecord&)>& sink);
std::vector<StepRecord> run_chain(const ChainConfig& config, const UnitGraph& graph);

void checkpoint(const Chain& chain, const std::filesystem::path& path);
// Throws CorruptCheckpoint on a damaged file or a different dataset.
Chain restore(const std::filesystem::path& path, const UnitGraph& graph);

}  // namespace flowrecom
