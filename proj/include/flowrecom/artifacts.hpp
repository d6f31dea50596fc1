#pragma once

#include <filesystem>
#include <string>

#include "flowrecom/graph.hpp"

namespace flowrecom {

// SHA-256 over a canonical serialization of nodes, edges and flow arcs.
// Two graphs with the same fingerprint score every plan identically.
std::string dataset_fingerprint(const UnitGraph& graph);

// Binary node/edge artifact (flows travel separately as the scaled CSV).
void write_graph_artifact(const UnitGraph& graph, const std::filesystem::path& path);
UnitGraph read_graph_artifact(const std::filesystem::path& path, const FlowMatrix& flows);

// Output of `ingest`: graph.bin + flows.csv + digest.json.
struct LoadedDataset {
  UnitGraph graph;
  std::string fingerprint;
};

inline constexpr const char* kGraphArtifact = "graph.bin";
inline constexpr const char* kFlowArtifact = "flows.csv";
inline constexpr const char* kDigestFile = "digest.json";

LoadedDataset load_dataset(const std::filesystem::path& artifacts_dir);

}  // namespace flowrecom
