#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowrecom/chain.hpp"
#include "json.hpp"

namespace flowrecom {

inline constexpr const char* kEngineVersion = "0.1.0";

namespace fs = std::filesystem;

// ---- ingest ---------------------------------------------------------------

struct IngestOptions {
  fs::path nodes;
  fs::path edges;
  std::vector<fs::path> device_flows;  // one file per month, scaled with `stats`
  std::optional<fs::path> stats;
  std::vector<fs::path> flow_matrices;  // already scaled monthly matrices
  std::optional<fs::path> ward_votes;   // with `weights`, replaces node votes
  std::optional<fs::path> weights;
  fs::path out;
};

struct IngestResult {
  std::string fingerprint;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t flow_entries = 0;
};

IngestResult cmd_ingest(const IngestOptions& options);

// ---- run ------------------------------------------------------------------

// Declarative run file mirroring one row of an experiment table:
// {"method": "BiasedRST", "bias": 100, "compactness_multiplier": 1,
//  "epsilon": 0.03, "steps": 10000, "seed": 1, "initial_plan": "seed.csv"}
struct RunSpec {
  ChainConfig chain;  // initial_plan left empty until bound to a graph
  fs::path initial_plan;
  std::size_t checkpoint_every = 0;
};

RunSpec parse_run_spec(const nlohmann::json& j, const fs::path& base_dir);
RunSpec read_run_spec(const fs::path& path);

struct RunOptions {
  fs::path config;
  fs::path artifacts;
  fs::path out;
  std::optional<std::uint64_t> seed;
  bool resume = false;  // continue from out/checkpoint.bin
};

struct RunResult {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  fs::path records;
};

// Writes out/records.jsonl, out/manifest.json (also on failure) and, when
// enabled, out/assignments/step_NNNNNN.csv and out/checkpoint.bin.
RunResult cmd_run(const RunOptions& options);

// Runs each config into out/<config stem>/ on up to `jobs` threads.
// Returns the per-config error messages (empty on full success).
std::vector<std::string> cmd_run_batch(const std::vector<fs::path>& configs,
                                       const fs::path& artifacts, const fs::path& out,
                                       std::optional<std::uint64_t> seed, unsigned jobs);

// ---- analyze --------------------------------------------------------------

// Each input is (label, records.jsonl). Writes out/analysis.json.
nlohmann::json cmd_analyze(const std::vector<std::pair<std::string, fs::path>>& ensembles,
                           const fs::path& out);

// ---- export-web -----------------------------------------------------------

struct ExportOptions {
  fs::path artifacts;
  std::vector<std::pair<std::string, fs::path>> plans;  // name, assignment CSV
  fs::path geojson;                                     // unit polygons
  std::string id_field = "id";
  std::optional<fs::path> analysis;
  fs::path out;
};

// Writes manifest.json, metrics.json, point_cloud.json and
// plans/<name>.geojson. Returns the manifest.
nlohmann::json cmd_export_web(const ExportOptions& options);

// ---- score ----------------------------------------------------------------

nlohmann::json cmd_score(const fs::path& artifacts, const fs::path& plan);

// Machine-readable error body for CLI failures.
nlohmann::json error_json(const std::exception& e);

}  // namespace flowrecom
