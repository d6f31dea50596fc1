#include "flowrecom/commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <cctype>
#include <set>
#include <thread>

#include "flowrecom/artifacts.hpp"
#include "flowrecom/analysis.hpp"
#include "flowrecom/digest.hpp"
#include "flowrecom/dissolve.hpp"
#include "flowrecom/error.hpp"
#include "flowrecom/metrics.hpp"

namespace flowrecom {
namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

nlohmann::json error_json(const std::exception& e) {
  if (const auto* fe = dynamic_cast<const Error*>(&e)) {
    return {{"error", {{"code", errc_name(fe->code())}, {"message", fe->detail()}}}};
  }
  return {{"error", {{"code", "Internal"}, {"message", e.what()}}}};
}

// ---- ingest ---------------------------------------------------------------

IngestResult cmd_ingest(const IngestOptions& options) {
  auto nodes = io::read_nodes(options.nodes);
  const auto edges = io::read_edges(options.edges);

  std::vector<FlowMatrix> months;
  if (!options.device_flows.empty()) {
    if (!options.stats) throw Error(Errc::InvalidConfig, "device flows need --stats");
    const auto stats = io::read_origin_stats(*options.stats);
    for (const auto& f : options.device_flows) {
      months.push_back(scale_flows(io::read_device_flows(f), stats));
    }
  }
  for (const auto& f : options.flow_matrices) months.push_back(io::read_flow_matrix(f));
  if (months.empty()) throw Error(Errc::InvalidConfig, "no flow files given");
  const FlowMatrix flows = monthly_average(months);

  if (options.ward_votes.has_value() != options.weights.has_value()) {
    throw Error(Errc::InvalidConfig, "--ward-votes and --weights go together");
  }
  if (options.ward_votes) {
    const auto weights = io::read_weights(*options.weights);
    const auto unit_votes = disaggregate_votes(io::read_ward_votes(*options.ward_votes), weights);
    std::map<std::string, UnitNode*> by_id;
    for (auto& n : nodes) by_id[n.id] = &n;
    for (const auto& [unit, votes] : unit_votes) {
      if (!by_id.count(unit)) throw Error(Errc::UnknownEndpoint, "weights name unit " + unit);
    }
    for (auto& n : nodes) {
      const auto it = unit_votes.find(n.id);
      n.votes_dem = it == unit_votes.end() ? 0.0 : it->second.dem;
      n.votes_rep = it == unit_votes.end() ? 0.0 : it->second.rep;
    }
  }

  const UnitGraph graph = build_graph(std::move(nodes), edges, flows);
  ensure_dir(options.out);
  write_graph_artifact(graph, options.out / kGraphArtifact);
  io::write_flow_matrix(flows, options.out / kFlowArtifact);

  IngestResult result{dataset_fingerprint(graph), graph.node_count(), graph.edge_count(),
                      flows.size()};
  nlohmann::json inputs = nlohmann::json::object();
  const auto note = [&](const fs::path& p) { inputs[p.generic_string()] = sha256_file(p); };
  note(options.nodes);
  note(options.edges);
  for (const auto& f : options.device_flows) note(f);
  for (const auto& f : options.flow_matrices) note(f);
  if (options.stats) note(*options.stats);
  if (options.ward_votes) note(*options.ward_votes);
  if (options.weights) note(*options.weights);
  write_json(options.out / kDigestFile,
             {{"fingerprint", result.fingerprint},
              {"engine_version", kEngineVersion},
              {"files",
               {{kGraphArtifact, sha256_file(options.out / kGraphArtifact)},
                {kFlowArtifact, sha256_file(options.out / kFlowArtifact)}}},
              {"inputs", inputs},
              {"counts",
               {{"nodes", result.nodes}, {"edges", result.edges}, {"flows", result.flow_entries}}}});
  return result;
}

// ---- run ------------------------------------------------------------------

RunSpec parse_run_spec(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "run config must be a JSON object");
  static const std::set<std::string> known = {
      "label", "method", "bias", "epsilon", "steps", "compactness_multiplier", "seed",
      "initial_plan", "record_assignments_every", "max_tree_retries", "checkpoint_every"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(Errc::InvalidConfig, "unknown config key '" + key + "'");
  }
  const auto count = [&](const char* key, std::size_t fallback, bool required) -> std::size_t {
    if (!j.contains(key)) {
      if (required) throw Error(Errc::InvalidConfig, std::string("missing '") + key + "'");
      return fallback;
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(Errc::InvalidConfig, std::string("'") + key + "' must be a nonnegative integer");
    }
    return v.get<std::size_t>();
  };
  const auto real = [&](const char* key, double fallback) -> double {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw Error(Errc::InvalidConfig, std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
  };

  RunSpec spec;
  if (!j.contains("method") || !j.at("method").is_string()) {
    throw Error(Errc::InvalidConfig, "missing 'method'");
  }
  spec.chain.proposal.method = parse_method(j.at("method").get<std::string>());
  spec.chain.proposal.bias = real("bias", 0.0);
  spec.chain.proposal.epsilon = real("epsilon", 0.03);
  spec.chain.proposal.max_tree_retries = count("max_tree_retries", 10000, false);
  spec.chain.steps = count("steps", 0, true);
  spec.chain.compactness_multiplier = real("compactness_multiplier", 1.0);
  spec.chain.seed = static_cast<std::uint64_t>(count("seed", 0, false));
  spec.chain.record_assignments_every = count("record_assignments_every", 0, false);
  spec.checkpoint_every = count("checkpoint_every", 0, false);
  spec.chain.label = j.value("label", std::string());
  if (!j.contains("initial_plan") || !j.at("initial_plan").is_string()) {
    throw Error(Errc::InvalidConfig, "missing 'initial_plan'");
  }
  const fs::path plan = j.at("initial_plan").get<std::string>();
  spec.initial_plan = plan.is_absolute() ? plan : base_dir / plan;
  // Validate everything except the plan, which needs a graph.
  ChainConfig probe = spec.chain;
  probe.validate();
  return spec;
}

RunSpec read_run_spec(const fs::path& path) {
  auto spec = parse_run_spec(read_json(path), path.parent_path());
  if (spec.chain.label.empty()) spec.chain.label = path.stem().string();
  return spec;
}

namespace {

std::size_t emitted_records(const ChainState& s) { return s.next_step + s.rejected; }

// Keeps the first `keep` lines of an existing record stream.
void truncate_lines(const fs::path& path, std::size_t keep) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string kept;
  std::string line;
  std::size_t n = 0;
  while (n < keep && std::getline(in, line)) {
    kept += line + "\n";
    ++n;
  }
  if (n < keep) {
    throw Error(Errc::CorruptCheckpoint, path.string() + " is shorter than the checkpoint");
  }
  in.close();
  write_text(path, kept);
}

}  // namespace

RunResult cmd_run(const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  ensure_dir(options.out);
  nlohmann::json manifest = {{"engine_version", kEngineVersion},
                             {"config", options.config.generic_string()},
                             {"artifacts", options.artifacts.generic_string()},
                             {"out", options.out.generic_string()}};
  const auto finish = [&](const char* status) {
    manifest["status"] = status;
    manifest["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_json(options.out / "manifest.json", manifest);
  };

  RunResult result;
  try {
    nlohmann::json inputs = nlohmann::json::object();
    inputs["config"] = sha256_file(options.config);
    inputs[kGraphArtifact] = sha256_file(options.artifacts / kGraphArtifact);
    inputs[kFlowArtifact] = sha256_file(options.artifacts / kFlowArtifact);
    auto spec = read_run_spec(options.config);
    inputs["initial_plan"] = sha256_file(spec.initial_plan);
    manifest["inputs"] = inputs;
    if (options.seed) spec.chain.seed = *options.seed;

    const auto data = load_dataset(options.artifacts);
    manifest["dataset"] = data.fingerprint;
    manifest["label"] = spec.chain.label;
    manifest["seed"] = spec.chain.seed;
    try {
      spec.chain.initial_plan =
          Partition::from_map(data.graph, io::read_assignment(spec.initial_plan));
    } catch (const Error& e) {
      throw Error(Errc::InvalidSeedPlan, e.what());
    }

    const fs::path records = options.out / "records.jsonl";
    const fs::path ckpt = options.out / "checkpoint.bin";
    const fs::path snapshots = options.out / "assignments";
    std::optional<Chain> chain;
    if (options.resume && fs::exists(ckpt)) {
      chain.emplace(restore(ckpt, data.graph));
      truncate_lines(records, emitted_records(chain->state()));
    } else {
      chain.emplace(spec.chain, data.graph);
      write_text(records, "");
    }
    if (spec.chain.record_assignments_every > 0) ensure_dir(snapshots);

    std::ofstream out(records, std::ios::binary | std::ios::app);
    if (!out) throw Error(Errc::IoError, "cannot write " + records.string());
    const std::string& dataset = chain->state().dataset;
    while (!chain->done()) {
      const StepRecord r = chain->next();
      out << record_to_json(r, dataset).dump() << '\n';
      if (r.assignment) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%06zu.csv", r.step);
        io::write_assignment(data.graph, chain->current(), snapshots / name);
      }
      if (r.accepted && spec.checkpoint_every > 0 && r.step % spec.checkpoint_every == 0) {
        out.flush();
        checkpoint(*chain, ckpt);
      }
    }
    out.flush();
    if (!out) throw Error(Errc::IoError, "short write to " + records.string());
    result.accepted = chain->state().accepted;
    result.rejected = chain->state().rejected;
    result.records = records;
    manifest["accepted"] = result.accepted;
    manifest["rejected"] = result.rejected;
    manifest["records_sha256"] = sha256_file(records);
  } catch (const std::exception& e) {
    manifest["error"] = error_json(e)["error"];
    finish("error");
    throw;
  }
  finish("ok");
  return result;
}

std::vector<std::string> cmd_run_batch(const std::vector<fs::path>& configs,
                                       const fs::path& artifacts, const fs::path& out,
                                       std::optional<std::uint64_t> seed, unsigned jobs) {
  std::vector<std::string> errors(configs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        cmd_run({configs[i], artifacts, out / configs[i].stem(), seed, false});
      } catch (const std::exception& e) {
        errors[i] = configs[i].string() + ": " + e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<std::string> failed;
  for (auto& e : errors) {
    if (!e.empty()) failed.push_back(std::move(e));
  }
  return failed;
}

// ---- analyze --------------------------------------------------------------

nlohmann::json cmd_analyze(const std::vector<std::pair<std::string, fs::path>>& inputs,
                           const fs::path& out) {
  if (inputs.empty()) throw Error(Errc::EmptySample, "analyze needs at least one ensemble");
  std::vector<Ensemble> ensembles;
  for (const auto& [label, path] : inputs) {
    for (const auto& e : ensembles) {
      if (e.label == label) throw Error(Errc::InvalidConfig, "duplicate ensemble label " + label);
    }
    ensembles.push_back(read_ensemble(path, label));
  }
  auto doc = analyze(ensembles);
  ensure_dir(out);
  write_json(out / "analysis.json", doc);
  return doc;
}

// ---- export-web -----------------------------------------------------------

namespace {

std::string feature_id(const nlohmann::json& feature, const std::string& field) {
  const auto props = feature.find("properties");
  if (props == feature.end() || !props->is_object() || !props->contains(field)) {
    throw Error(Errc::ParseError, "GeoJSON feature lacks property '" + field + "'");
  }
  const auto& v = props->at(field);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(Errc::ParseError, "GeoJSON id property must be a string or integer");
}

void check_plan_name(const std::string& name) {
  if (name.empty()) throw Error(Errc::InvalidConfig, "empty plan name");
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      throw Error(Errc::InvalidConfig, "plan name '" + name + "' must be [A-Za-z0-9_-]");
    }
  }
}

const nlohmann::json kAttributes = nlohmann::json::array({
    {{"field", "population"}, {"label", "Population"}},
    {{"field", "votes_dem"}, {"label", "Democratic votes"}},
    {{"field", "votes_rep"}, {"label", "Republican votes"}},
    {{"field", "polsby_popper"}, {"label", "Polsby-Popper compactness"}},
    {{"field", "efficiency_gap"}, {"label", "Efficiency gap contribution"}},
    {{"field", "intra_flows"}, {"label", "Intra-district flows"}},
    {{"field", "inter_flows_out"}, {"label", "Outbound inter-district flows"}},
    {{"field", "inter_flows_in"}, {"label", "Inbound inter-district flows"}},
});

}  // namespace

nlohmann::json cmd_export_web(const ExportOptions& options) {
  const auto data = load_dataset(options.artifacts);
  const UnitGraph& graph = data.graph;

  const auto units = read_json(options.geojson);
  std::map<std::string, geo::MultiPolygon> shapes;
  for (const auto& f : units.at("features")) {
    const auto id = feature_id(f, options.id_field);
    const auto geom = f.find("geometry");
    if (geom == f.end() || geom->is_null()) throw Error(Errc::MissingGeometry, id);
    shapes[id] = geo::from_geojson(*geom);
  }

  nlohmann::json point_cloud = nlohmann::json::array(
      {nlohmann::json::array({"compactness", "efficiency_gap", "ir", "ensemble"})});
  if (options.analysis) {
    const auto analysis = read_json(*options.analysis);
    if (analysis.contains("dataset") && analysis.at("dataset") != data.fingerprint) {
      throw Error(Errc::DigestMismatch, "analysis was computed on a different dataset");
    }
    point_cloud = analysis.at("point_cloud");
  }

  ensure_dir(options.out / "plans");
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json plan_index = nlohmann::json::array();
  std::map<std::string, std::string> files;

  for (const auto& [name, path] : options.plans) {
    check_plan_name(name);
    if (metrics.contains(name)) throw Error(Errc::InvalidConfig, "duplicate plan name " + name);
    const auto labels = io::read_assignment(path);
    for (const auto& [unit, d] : labels) {
      if (!shapes.count(unit) || !graph.find(unit)) {
        throw Error(Errc::UnknownUnitInAssignment, name + ": " + unit);
      }
    }
    const auto plan = Partition::from_map(graph, labels);
    const auto scored = score_plan(plan, graph);

    std::vector<double> inflow(static_cast<std::size_t>(plan.district_count()), 0.0);
    for (NodeIndex o = 0; o < graph.node_count(); ++o) {
      for (const auto& arc : graph.out_flows(o)) {
        inflow[static_cast<std::size_t>(plan.district_of(arc.target) - 1)] += arc.flow;
      }
    }

    auto features = nlohmann::json::array();
    for (DistrictId d = 1; d <= plan.district_count(); ++d) {
      const auto& s = plan.district(d);
      const auto geom = district_geometry(plan, d);
      std::vector<geo::MultiPolygon> parts;
      for (const NodeIndex x : plan.members(d)) parts.push_back(shapes.at(graph.node(x).id));
      const auto idx = static_cast<std::size_t>(d - 1);
      features.push_back(
          {{"type", "Feature"},
           {"properties",
            {{"district", d},
             {"units", s.units},
             {"population", s.population},
             {"votes_dem", s.votes_dem},
             {"votes_rep", s.votes_rep},
             {"area", geom.area},
             {"perimeter", geom.perimeter},
             {"polsby_popper", scored.per_district_pp[idx]},
             {"efficiency_gap", scored.per_district_eg[idx]},
             {"intra_flows", s.intra_flow},
             {"inter_flows_out", s.out_flow - s.intra_flow},
             {"inter_flows_in", inflow[idx] - s.intra_flow}}},
           {"geometry", geo::to_geojson(geo::dissolve(parts))}});
    }
    const std::string rel = "plans/" + name + ".geojson";
    write_json(options.out / rel,
               {{"type", "FeatureCollection"}, {"plan", name}, {"features", features}});
    files[rel] = sha256_file(options.out / rel);
    metrics[name] = scored;
    plan_index.push_back({{"name", name},
                          {"label", name},
                          {"geometry", rel},
                          {"district_count", plan.district_count()},
                          {"summary",
                           {{"ir", scored.ir},
                            {"normalized_ir", scored.normalized_ir},
                            {"mean_polsby_popper", scored.mean_polsby_popper},
                            {"efficiency_gap", scored.efficiency_gap},
                            {"seats_dem", scored.seats_dem},
                            {"seats_rep", scored.seats_rep},
                            {"cut_edges", scored.cut_edges}}}});
  }

  write_json(options.out / "metrics.json", metrics);
  files["metrics.json"] = sha256_file(options.out / "metrics.json");
  write_json(options.out / "point_cloud.json", point_cloud);
  files["point_cloud.json"] = sha256_file(options.out / "point_cloud.json");

  nlohmann::json file_json = files;
  nlohmann::json manifest = {{"schema", "flowrecom-web-bundle/1"},
                             {"engine_version", kEngineVersion},
                             {"dataset", data.fingerprint},
                             {"plans", plan_index},
                             {"attributes", kAttributes},
                             {"efficiency_gap_sign", "wasted_dem_minus_wasted_rep"},
                             {"metrics", "metrics.json"},
                             {"point_cloud", "point_cloud.json"},
                             {"files", file_json},
                             {"bundle_digest", sha256_hex(file_json.dump())}};
  write_json(options.out / "manifest.json", manifest);
  return manifest;
}

// ---- score ----------------------------------------------------------------

nlohmann::json cmd_score(const fs::path& artifacts, const fs::path& plan) {
  const auto data = load_dataset(artifacts);
  const auto partition = Partition::from_map(data.graph, io::read_assignment(plan));
  if (!contiguous(partition, data.graph)) {
    throw Error(Errc::InvalidPartition, plan.string() + " has a non-contiguous district");
  }
  nlohmann::json j = score_plan(partition, data.graph);
  return j;
}

}  // namespace flowrecom
