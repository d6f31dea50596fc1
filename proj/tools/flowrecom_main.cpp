#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowrecom/commands.hpp"
#include "flowrecom/error.hpp"

namespace {

// "label=path" or plain "path" (label taken from the parent directory or stem).
std::pair<std::string, flowrecom::fs::path> labelled(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
  flowrecom::fs::path p(arg);
  std::string label = p.stem().string();
  if (label == "records" && p.has_parent_path()) label = p.parent_path().filename().string();
  return {label, p};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace flowrecom;
  CLI::App app{"flowrecom: flow-aware ReCom ensembles for redistricting analysis"};
  app.set_version_flag("--version", kEngineVersion);
  app.require_subcommand(1);

  IngestOptions ingest;
  std::string stats;
  std::string ward_votes;
  std::string weights;
  auto* c_ingest = app.add_subcommand("ingest", "Build graph and flow artifacts from CSV tables");
  c_ingest->add_option("--nodes", ingest.nodes, "Node table CSV")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--edges", ingest.edges, "Edge table CSV")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--device-flows", ingest.device_flows, "Monthly device-flow CSVs")
      ->check(CLI::ExistingFile);
  c_ingest->add_option("--stats", stats, "Origin stats CSV")->check(CLI::ExistingFile);
  c_ingest->add_option("--flow-matrix", ingest.flow_matrices, "Scaled monthly flow CSVs")
      ->check(CLI::ExistingFile);
  c_ingest->add_option("--ward-votes", ward_votes, "Ward vote CSV")->check(CLI::ExistingFile);
  c_ingest->add_option("--weights", weights, "Ward-to-unit weight CSV")->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out, "Artifact directory")->required();

  std::vector<std::string> configs;
  std::string artifacts;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool resume = false;
  auto* c_run = app.add_subcommand("run", "Run one or more ReCom chains");
  c_run->add_option("--config", configs, "Run config JSON (repeat for batch mode)")
      ->required()
      ->check(CLI::ExistingFile);
  c_run->add_option("--artifacts", artifacts, "Directory written by ingest")->required();
  c_run->add_option("--out", out, "Output directory")->required();
  c_run->add_option("--seed", seed, "Override the config seed");
  c_run->add_option("--jobs", jobs, "Concurrent chains in batch mode")->check(CLI::PositiveNumber);
  c_run->add_flag("--resume", resume, "Continue from out/checkpoint.bin");

  std::vector<std::string> ensembles;
  auto* c_analyze = app.add_subcommand("analyze", "Summaries, KS tests, seat bands, point cloud");
  c_analyze->add_option("--ensemble", ensembles, "Record stream, optionally label=path")->required();
  c_analyze->add_option("--out", out, "Output directory")->required();

  ExportOptions exp;
  std::vector<std::string> plans;
  std::string analysis;
  auto* c_export = app.add_subcommand("export-web", "Write a bundle for the web explorer");
  c_export->add_option("--artifacts", exp.artifacts, "Directory written by ingest")->required();
  c_export->add_option("--plan", plans, "name=assignment.csv")->required();
  c_export->add_option("--geojson", exp.geojson, "Unit polygons")->required()->check(CLI::ExistingFile);
  c_export->add_option("--id-field", exp.id_field, "GeoJSON property holding the unit id");
  c_export->add_option("--analysis", analysis, "analysis.json from analyze")->check(CLI::ExistingFile);
  c_export->add_option("--out", exp.out, "Bundle directory")->required();

  std::string plan;
  auto* c_score = app.add_subcommand("score", "Print PlanMetrics for one plan as JSON");
  c_score->add_option("--artifacts", artifacts, "Directory written by ingest")->required();
  c_score->add_option("--plan", plan, "Assignment CSV (unit_id,district)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_ingest) {
      if (!stats.empty()) ingest.stats = stats;
      if (!ward_votes.empty()) ingest.ward_votes = ward_votes;
      if (!weights.empty()) ingest.weights = weights;
      const auto r = cmd_ingest(ingest);
      std::cout << nlohmann::json{{"fingerprint", r.fingerprint},
                                  {"nodes", r.nodes},
                                  {"edges", r.edges},
                                  {"flow_entries", r.flow_entries}}
                       .dump()
                << "\n";
    } else if (*c_run) {
      if (configs.size() == 1) {
        const auto r = cmd_run({configs[0], artifacts, out, seed, resume});
        std::cout << nlohmann::json{{"accepted", r.accepted},
                                    {"rejected", r.rejected},
                                    {"records", r.records.string()}}
                         .dump()
                  << "\n";
      } else {
        std::vector<fs::path> paths(configs.begin(), configs.end());
        const auto failed = cmd_run_batch(paths, artifacts, out, seed, jobs);
        if (!failed.empty()) {
          nlohmann::json err = {{"error", {{"code", "BatchFailed"}, {"message", failed}}}};
          std::cerr << err.dump() << "\n";
          return 1;
        }
      }
    } else if (*c_analyze) {
      std::vector<std::pair<std::string, fs::path>> inputs;
      for (const auto& e : ensembles) inputs.push_back(labelled(e));
      cmd_analyze(inputs, out);
    } else if (*c_export) {
      for (const auto& p : plans) {
        if (p.find('=') == std::string::npos) {
          throw flowrecom::Error(flowrecom::Errc::InvalidConfig, "--plan expects name=path, got " + p);
        }
        exp.plans.push_back(labelled(p));
      }
      if (!analysis.empty()) exp.analysis = analysis;
      const auto manifest = cmd_export_web(exp);
      std::cout << nlohmann::json{{"bundle_digest", manifest.at("bundle_digest")}}.dump() << "\n";
    } else if (*c_score) {
      std::cout << cmd_score(artifacts, plan).dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << error_json(e).dump() << "\n";
    return 1;
  }
  return 0;
}
