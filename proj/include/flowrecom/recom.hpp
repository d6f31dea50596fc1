#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowrecom/graph.hpp"
#include "flowrecom/rng.hpp"

namespace flowrecom {

enum class Method { RST, BiasedRST, MaxIRCut, MinIRCut };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);  // throws InvalidConfig

struct ProposalConfig {
  Method method = Method::RST;
  double bias = 0.0;    // BiasedRST only; nonzero, sign selects direction
  double epsilon = 0.03;  // total allowed spread, as a fraction of the ideal
  std::size_t max_tree_retries = 10000;

  void validate() const;  // throws InvalidConfig
};

// Spanning tree on a merged region, stored in local indices 0..m-1 where
// local i is graph node `nodes[i]` (ascending). Local 0 is the root.
// `preorder` lists locals in DFS preorder; the subtree of v occupies
// preorder positions [tin[v], tin[v] + size[v]).
struct SpanningTree {
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  std::vector<NodeIndex> nodes;
  std::vector<EdgeIndex> edges;          // graph edges, ascending
  std::vector<std::uint32_t> parent;     // local; kNone at the root
  std::vector<EdgeIndex> parent_edge;    // graph edge to the parent
  std::vector<std::uint32_t> preorder;
  std::vector<std::uint32_t> tin;
  std::vector<std::uint32_t> size;

  bool in_subtree(std::uint32_t x, std::uint32_t v) const {
    return tin[x] >= tin[v] && tin[x] < tin[v] + size[v];
  }
};

struct CutCandidate {
  EdgeIndex edge = 0;
  std::uint32_t child = 0;  // local root of the detached subtree
  long long side_population = 0;

  friend bool operator==(const CutCandidate&, const CutCandidate&) = default;
};

// Labels for tree.nodes after cutting `cut`: the root side gets `root_label`,
// the detached subtree gets `other_label`.
std::vector<DistrictId> induced_assignment(const SpanningTree& tree, const CutCandidate& cut,
                                           DistrictId root_label, DistrictId other_label);

// Districts on both sides of a cut edge drawn uniformly from the cut set,
// returned in ascending label order.
std::pair<DistrictId, DistrictId> select_merge_pair(const Partition& partition,
                                                    const UnitGraph& graph, Rng& rng);

// Maximum spanning tree of the induced subgraph under random weights:
// U for RST, U * flow_weight * bias for BiasedRST. Ties, including all
// zero-flow edges, are broken by an independent uniform key, then edge index.
SpanningTree build_tree(std::span<const NodeIndex> region, const UnitGraph& graph,
                        const ProposalConfig& config, Rng& rng);

// Every tree edge whose two sides both fall in
// [ideal * (1 - epsilon/2), ideal * (1 + epsilon/2)], in canonical edge order.
std::vector<CutCandidate> enumerate_balanced_cuts(const SpanningTree& tree, const UnitGraph& graph,
                                                  double epsilon, double ideal_population);

// Uniform choice for the tree methods; arg max / arg min of the post-cut IR
// for MaxIRCut / MinIRCut (first candidate wins ties).
CutCandidate select_cut(std::span<const CutCandidate> candidates, const SpanningTree& tree,
                        DistrictId root_label, DistrictId other_label,
                        const ProposalConfig& config, const Partition& partition,
                        const UnitGraph& graph, Rng& rng);

struct ProposalInfo {
  DistrictId a = 0;
  DistrictId b = 0;
  std::size_t trees_drawn = 0;
};

// One ReCom move. The returned partition differs from the input only on the
// merged pair; the root (lowest-index merged unit) keeps its label.
Partition propose(const Partition& partition, const UnitGraph& graph,
                  const ProposalConfig& config, Rng& rng, ProposalInfo* info = nullptr);

}  // namespace flowrecom
