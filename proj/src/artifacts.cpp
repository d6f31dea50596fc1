#include "flowrecom/artifacts.hpp"

#include "flowrecom/digest.hpp"
#include "flowrecom/error.hpp"

namespace flowrecom {
namespace {

constexpr std::string_view kGraphMagic = "FRGRAPH1";

void write_nodes_edges(ByteWriter& w, const UnitGraph& graph) {
  w.u64(graph.node_count());
  for (const auto& n : graph.nodes()) {
    w.str(n.id);
    w.i64(n.population);
    w.i64(n.voting_age_pop);
    w.f64(n.votes_dem);
    w.f64(n.votes_rep);
    w.f64(n.area);
    w.f64(n.perimeter);
  }
  w.u64(graph.edge_count());
  for (const auto& e : graph.edges()) {
    w.str(graph.node(e.u).id);
    w.str(graph.node(e.v).id);
    w.f64(e.shared_perimeter);
  }
}

}  // namespace

std::string dataset_fingerprint(const UnitGraph& graph) {
  ByteWriter w;
  write_nodes_edges(w, graph);
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    const auto arcs = graph.out_flows(i);
    w.u64(arcs.size());
    for (const auto& a : arcs) {
      w.u32(a.target);
      w.f64(a.flow);
    }
  }
  return sha256_hex(w.bytes());
}

void write_graph_artifact(const UnitGraph& graph, const std::filesystem::path& path) {
  ByteWriter w;
  write_nodes_edges(w, graph);
  write_sealed(path, kGraphMagic, w.bytes());
}

UnitGraph read_graph_artifact(const std::filesystem::path& path, const FlowMatrix& flows) {
  const auto payload = read_sealed(path, kGraphMagic);
  ByteReader r(payload, path.string());
  std::vector<UnitNode> nodes(r.u64());
  for (auto& n : nodes) {
    n.id = r.str();
    n.population = r.i64();
    n.voting_age_pop = r.i64();
    n.votes_dem = r.f64();
    n.votes_rep = r.f64();
    n.area = r.f64();
    n.perimeter = r.f64();
  }
  std::vector<EdgeInput> edges(r.u64());
  for (auto& e : edges) {
    e.u = r.str();
    e.v = r.str();
    e.shared_perimeter = r.f64();
  }
  if (!r.done()) throw Error(Errc::CorruptCheckpoint, path.string() + ": trailing bytes");
  return build_graph(std::move(nodes), edges, flows);
}

LoadedDataset load_dataset(const std::filesystem::path& artifacts_dir) {
  const auto flows = io::read_flow_matrix(artifacts_dir / kFlowArtifact);
  auto graph = read_graph_artifact(artifacts_dir / kGraphArtifact, flows);
  auto fp = dataset_fingerprint(graph);
  return {std::move(graph), std::move(fp)};
}

}  // namespace flowrecom
