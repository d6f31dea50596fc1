#include "flowrecom/chain.hpp"

#include <cmath>

#include "flowrecom/artifacts.hpp"
#include "flowrecom/digest.hpp"
#include "flowrecom/error.hpp"

namespace flowrecom {

void ChainConfig::validate() const {
  proposal.validate();
  if (steps < 1) throw Error(Errc::InvalidConfig, "steps must be >= 1");
  if (!(compactness_multiplier >= 1.0) || !std::isfinite(compactness_multiplier)) {
    throw Error(Errc::InvalidConfig, "compactness_multiplier must be >= 1");
  }
}

std::string_view rejection_name(Rejection r) {
  return r == Rejection::CompactnessBound ? "CompactnessBound" : "RetriesExhausted";
}

nlohmann::json record_to_json(const StepRecord& record, const std::string& dataset) {
  nlohmann::json j;
  j["step"] = record.step;
  j["attempt"] = record.attempt;
  j["accepted"] = record.accepted;
  if (record.rejection) j["rejection_reason"] = rejection_name(*record.rejection);
  if (record.metrics) j["metrics"] = *record.metrics;
  j["dataset"] = dataset;
  return j;
}

StepRecord record_from_json(const nlohmann::json& j) {
  StepRecord r;
  j.at("step").get_to(r.step);
  j.at("attempt").get_to(r.attempt);
  j.at("accepted").get_to(r.accepted);
  if (j.contains("rejection_reason")) {
    const auto s = j.at("rejection_reason").get<std::string>();
    if (s == "CompactnessBound") r.rejection = Rejection::CompactnessBound;
    else if (s == "RetriesExhausted") r.rejection = Rejection::RetriesExhausted;
    else throw Error(Errc::ParseError, "unknown rejection_reason " + s);
  }
  if (j.contains("metrics")) r.metrics = j.at("metrics").get<PlanMetrics>();
  if (!r.accepted && !r.rejection) {
    throw Error(Errc::ParseError, "rejected record without rejection_reason");
  }
  return r;
}

Chain::Chain(ChainConfig config, const UnitGraph& graph) : graph_(&graph) {
  config.validate();
  const auto& plan = config.initial_plan;
  if (plan.unit_count() != graph.node_count() || plan.district_count() < 2) {
    throw Error(Errc::InvalidSeedPlan, "seed plan must assign every unit to one of >= 2 districts");
  }
  if (!contiguous(plan, graph)) throw Error(Errc::InvalidSeedPlan, "seed plan is not contiguous");
  state_.dataset = dataset_fingerprint(graph);
  state_.current = plan;
  state_.initial_cut_edges = cut_edge_count(plan);
  state_.config = std::move(config);
}

Chain::Chain(ChainState state, const UnitGraph& graph) : graph_(&graph), state_(std::move(state)) {
  if (state_.dataset != dataset_fingerprint(graph)) {
    throw Error(Errc::CorruptCheckpoint, "checkpoint belongs to a different dataset");
  }
}

StepRecord Chain::accepted_record() {
  StepRecord r;
  r.step = state_.next_step;
  r.attempt = state_.attempt;
  r.accepted = true;
  r.metrics = score_plan(state_.current, *graph_);
  const auto every = state_.config.record_assignments_every;
  if (every > 0 && r.step % every == 0) {
    r.assignment.emplace(state_.current.assignment().begin(), state_.current.assignment().end());
  }
  ++state_.next_step;
  state_.attempt = 0;
  return r;
}

StepRecord Chain::next() {
  if (done()) throw Error(Errc::InvalidConfig, "chain already finished");
  if (state_.next_step == 0) return accepted_record();

  const auto& cfg = state_.config;
  if (state_.attempt >= cfg.proposal.max_tree_retries) {
    throw Error(Errc::StepStalled, "step " + std::to_string(state_.next_step) + " made " +
                                       std::to_string(state_.attempt) + " attempts");
  }
  auto rng = Rng::derive(cfg.seed, state_.next_step, state_.attempt);
  StepRecord rejected;
  rejected.step = state_.next_step;
  rejected.attempt = state_.attempt;
  try {
    Partition proposal = propose(state_.current, *graph_, cfg.proposal, rng);
    const double bound =
        cfg.compactness_multiplier * static_cast<double>(state_.initial_cut_edges);
    if (static_cast<double>(cut_edge_count(proposal)) <= bound) {
      state_.current = std::move(proposal);
      ++state_.accepted;
      return accepted_record();
    }
    rejected.rejection = Rejection::CompactnessBound;
  } catch (const Error& e) {
    if (e.code() != Errc::RetriesExhausted) throw;
    rejected.rejection = Rejection::RetriesExhausted;
  }
  ++state_.attempt;
  ++state_.rejected;
  return rejected;
}

void run_chain(const ChainConfig& config, const UnitGraph& graph,
               const std::function<void(const StepRecord&)>& sink) {
  Chain chain(config, graph);
  while (!chain.done()) sink(chain.next());
}

std::vector<StepRecord> run_chain(const ChainConfig& config, const UnitGraph& graph) {
  std::vector<StepRecord> out;
  run_chain(config, graph, [&](const StepRecord& r) { out.push_back(r); });
  return out;
}

namespace {

constexpr std::string_view kCheckpointMagic = "FRCKPT01";

void write_labels(ByteWriter& w, std::span<const DistrictId> labels) {
  w.u64(labels.size());
  for (auto d : labels) w.u32(static_cast<std::uint32_t>(d));
}

std::vector<DistrictId> read_labels(ByteReader& r) {
  std::vector<DistrictId> labels(r.u64());
  for (auto& d : labels) d = static_cast<DistrictId>(r.u32());
  return labels;
}

ByteWriter serialize(const ChainState& s) {
  ByteWriter w;
  w.str(s.dataset);
  w.str(s.config.label);
  w.u8(static_cast<std::uint8_t>(s.config.proposal.method));
  w.f64(s.config.proposal.bias);
  w.f64(s.config.proposal.epsilon);
  w.u64(s.config.proposal.max_tree_retries);
  w.u64(s.config.steps);
  w.f64(s.config.compactness_multiplier);
  w.u64(s.config.seed);
  w.u64(s.config.record_assignments_every);
  write_labels(w, s.config.initial_plan.assignment());
  write_labels(w, s.current.assignment());
  const auto cuts = s.current.cut_edges();
  w.u64(cuts.size());
  for (auto e : cuts) w.u32(e);
  w.u64(s.initial_cut_edges);
  w.u64(s.next_step);
  w.u64(s.attempt);
  w.u64(s.accepted);
  w.u64(s.rejected);
  return w;
}

}  // namespace

std::string Chain::state_hash() const { return sha256_hex(serialize(state_).bytes()); }

void checkpoint(const Chain& chain, const std::filesystem::path& path) {
  write_sealed(path, kCheckpointMagic, serialize(chain.state()).bytes());
}

Chain restore(const std::filesystem::path& path, const UnitGraph& graph) {
  const auto payload = read_sealed(path, kCheckpointMagic);
  ByteReader r(payload, path.string());
  ChainState s;
  s.dataset = r.str();
  s.config.label = r.str();
  const auto method = r.u8();
  if (method > static_cast<std::uint8_t>(Method::MinIRCut)) {
    throw Error(Errc::CorruptCheckpoint, "bad method tag");
  }
  s.config.proposal.method = static_cast<Method>(method);
  s.config.proposal.bias = r.f64();
  s.config.proposal.epsilon = r.f64();
  s.config.proposal.max_tree_retries = r.u64();
  s.config.steps = r.u64();
  s.config.compactness_multiplier = r.f64();
  s.config.seed = r.u64();
  s.config.record_assignments_every = r.u64();
  auto initial = read_labels(r);
  auto current = read_labels(r);
  std::vector<EdgeIndex> cuts(r.u64());
  for (auto& e : cuts) e = r.u32();
  s.initial_cut_edges = r.u64();
  s.next_step = r.u64();
  s.attempt = r.u64();
  s.accepted = r.u64();
  s.rejected = r.u64();
  if (!r.done()) throw Error(Errc::CorruptCheckpoint, path.string() + ": trailing bytes");
  try {
    s.config.initial_plan = Partition::from_assignment(graph, std::move(initial));
    s.current = Partition::restore(graph, std::move(current), std::move(cuts));
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptCheckpoint) throw;
    throw Error(Errc::CorruptCheckpoint, e.what());
  }
  return Chain(std::move(s), graph);
}

}  // namespace flowrecom
