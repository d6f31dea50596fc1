#include "flowrecom/recom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flowrecom/error.hpp"
#include "flowrecom/metrics.hpp"

namespace flowrecom {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::RST: return "RST";
    case Method::BiasedRST: return "BiasedRST";
    case Method::MaxIRCut: return "MaxIRCut";
    case Method::MinIRCut: return "MinIRCut";
  }
  return "RST";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::RST, Method::BiasedRST, Method::MaxIRCut, Method::MinIRCut}) {
    if (method_name(m) == name) return m;
  }
  throw Error(Errc::InvalidConfig, "unknown method '" + std::string(name) +
                                       "' (expected RST, BiasedRST, MaxIRCut or MinIRCut)");
}

void ProposalConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) {
    throw Error(Errc::InvalidConfig, "epsilon must lie in [0, 0.5)");
  }
  if (method == Method::BiasedRST && (bias == 0.0 || !std::isfinite(bias))) {
    throw Error(Errc::InvalidConfig, "BiasedRST needs a finite nonzero bias");
  }
  if (max_tree_retries == 0) throw Error(Errc::InvalidConfig, "max_tree_retries must be positive");
}

std::vector<DistrictId> induced_assignment(const SpanningTree& tree, const CutCandidate& cut,
                                           DistrictId root_label, DistrictId other_label) {
  std::vector<DistrictId> labels(tree.nodes.size());
  for (std::uint32_t x = 0; x < labels.size(); ++x) {
    labels[x] = tree.in_subtree(x, cut.child) ? other_label : root_label;
  }
  return labels;
}

std::pair<DistrictId, DistrictId> select_merge_pair(const Partition& partition,
                                                    const UnitGraph& graph, Rng& rng) {
  const auto cuts = partition.cut_edges();
  if (cuts.empty()) throw Error(Errc::NoCutEdges, "partition has a single district");
  const auto& e = graph.edge(cuts[rng.below(cuts.size())]);
  const DistrictId x = partition.district_of(e.u);
  const DistrictId y = partition.district_of(e.v);
  return {std::min(x, y), std::max(x, y)};
}

namespace {

struct Dsu {
  explicit Dsu(std::size_t n) : parent(n), rank(n, 0) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    return true;
  }
  std::vector<std::uint32_t> parent;
  std::vector<std::uint8_t> rank;
};

struct WeightedEdge {
  double weight;
  double key;
  EdgeIndex edge;
  std::uint32_t lu;
  std::uint32_t lv;
};

}  // namespace

SpanningTree build_tree(std::span<const NodeIndex> region, const UnitGraph& graph,
                        const ProposalConfig& config, Rng& rng) {
  SpanningTree tree;
  tree.nodes.assign(region.begin(), region.end());
  std::sort(tree.nodes.begin(), tree.nodes.end());
  const auto m = static_cast<std::uint32_t>(tree.nodes.size());
  if (m == 0) throw Error(Errc::DisconnectedSubgraph, "empty region");

  std::vector<std::uint32_t> local(graph.node_count(), SpanningTree::kNone);
  for (std::uint32_t i = 0; i < m; ++i) local[tree.nodes[i]] = i;

  const bool biased = config.method == Method::BiasedRST;
  std::vector<WeightedEdge> candidates;
  for (std::uint32_t i = 0; i < m; ++i) {
    for (const auto& nb : graph.neighbors(tree.nodes[i])) {
      if (nb.node <= tree.nodes[i] || local[nb.node] == SpanningTree::kNone) continue;
      candidates.push_back({0.0, 0.0, nb.edge, i, local[nb.node]});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return x.edge < y.edge; });
  for (auto& c : candidates) {
    const double u = rng.uniform();
    c.weight = biased ? u * graph.edge(c.edge).flow_weight * config.bias : u;
    c.key = biased ? rng.uniform() : 0.0;
  }
  std::sort(candidates.begin(), candidates.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    if (x.key != y.key) return x.key > y.key;
    return x.edge < y.edge;
  });

  Dsu dsu(m);
  std::vector<std::vector<std::pair<std::uint32_t, EdgeIndex>>> adj(m);
  for (const auto& c : candidates) {
    if (!dsu.unite(c.lu, c.lv)) continue;
    tree.edges.push_back(c.edge);
    adj[c.lu].push_back({c.lv, c.edge});
    adj[c.lv].push_back({c.lu, c.edge});
    if (tree.edges.size() + 1 == m) break;
  }
  if (tree.edges.size() + 1 != m) {
    throw Error(Errc::DisconnectedSubgraph,
                "merged region of " + std::to_string(m) + " units is not connected");
  }
  std::sort(tree.edges.begin(), tree.edges.end());
  for (auto& a : adj) std::sort(a.begin(), a.end());

  tree.parent.assign(m, SpanningTree::kNone);
  tree.parent_edge.assign(m, 0);
  tree.tin.assign(m, 0);
  tree.size.assign(m, 1);
  tree.preorder.reserve(m);
  std::vector<std::uint32_t> stack{0};
  std::vector<char> visited(m, 0);
  visited[0] = 1;
  while (!stack.empty()) {
    const std::uint32_t x = stack.back();
    stack.pop_back();
    tree.tin[x] = static_cast<std::uint32_t>(tree.preorder.size());
    tree.preorder.push_back(x);
    for (auto it = adj[x].rbegin(); it != adj[x].rend(); ++it) {
      if (visited[it->first]) continue;
      visited[it->first] = 1;
      tree.parent[it->first] = x;
      tree.parent_edge[it->first] = it->second;
      stack.push_back(it->first);
    }
  }
  for (auto it = tree.preorder.rbegin(); it != tree.preorder.rend(); ++it) {
    if (tree.parent[*it] != SpanningTree::kNone) tree.size[tree.parent[*it]] += tree.size[*it];
  }
  return tree;
}

std::vector<CutCandidate> enumerate_balanced_cuts(const SpanningTree& tree, const UnitGraph& graph,
                                                  double epsilon, double ideal_population) {
  const std::size_t m = tree.nodes.size();
  std::vector<long long> sub(m, 0);
  for (std::size_t i = 0; i < m; ++i) sub[i] = graph.node(tree.nodes[i]).population;
  for (auto it = tree.preorder.rbegin(); it != tree.preorder.rend(); ++it) {
    if (tree.parent[*it] != SpanningTree::kNone) sub[tree.parent[*it]] += sub[*it];
  }
  const long long total = sub[0];
  const double lo = ideal_population * (1.0 - epsilon / 2.0);
  const double hi = ideal_population * (1.0 + epsilon / 2.0);
  const auto ok = [&](long long p) {
    const auto v = static_cast<double>(p);
    return v >= lo && v <= hi;
  };
  std::vector<CutCandidate> out;
  for (std::uint32_t v = 0; v < m; ++v) {
    if (tree.parent[v] == SpanningTree::kNone) continue;
    if (ok(sub[v]) && ok(total - sub[v])) out.push_back({tree.parent_edge[v], v, sub[v]});
  }
  std::sort(out.begin(), out.end(),
            [](const CutCandidate& x, const CutCandidate& y) { return x.edge < y.edge; });
  return out;
}

CutCandidate select_cut(std::span<const CutCandidate> candidates, const SpanningTree& tree,
                        DistrictId root_label, DistrictId other_label,
                        const ProposalConfig& config, const Partition& partition,
                        const UnitGraph& graph, Rng& rng) {
  if (candidates.empty()) throw Error(Errc::EmptyCandidates, "no balanced cut");
  if (config.method == Method::RST || config.method == Method::BiasedRST) {
    return candidates[rng.below(candidates.size())];
  }
  const bool maximize = config.method == Method::MaxIRCut;
  const DistrictId a = std::min(root_label, other_label);
  const DistrictId b = std::max(root_label, other_label);
  std::size_t best = 0;
  double best_ir = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto labels = induced_assignment(tree, candidates[i], root_label, other_label);
    const auto sums = ir_delta(partition, graph, a, b, tree.nodes, labels);
    const double ir = sums.inter > 0.0 ? sums.intra / sums.inter
                                       : std::numeric_limits<double>::infinity();
    if (i == 0 || (maximize ? ir > best_ir : ir < best_ir)) {
      best = i;
      best_ir = ir;
    }
  }
  return candidates[best];
}

Partition propose(const Partition& partition, const UnitGraph& graph,
                  const ProposalConfig& config, Rng& rng, ProposalInfo* info) {
  const auto [a, b] = select_merge_pair(partition, graph, rng);
  std::vector<NodeIndex> region;
  for (NodeIndex i = 0; i < partition.unit_count(); ++i) {
    const DistrictId d = partition.district_of(i);
    if (d == a || d == b) region.push_back(i);
  }
  const DistrictId root_label = partition.district_of(region.front());
  const DistrictId other_label = root_label == a ? b : a;
  const double ideal = static_cast<double>(graph.total_population()) / partition.district_count();

  for (std::size_t attempt = 1; attempt <= config.max_tree_retries; ++attempt) {
    const auto tree = build_tree(region, graph, config, rng);
    const auto cuts = enumerate_balanced_cuts(tree, graph, config.epsilon, ideal);
    if (cuts.empty()) continue;
    const auto cut = select_cut(cuts, tree, root_label, other_label, config, partition, graph, rng);
    Partition next = partition;
    next.reassign(graph, a, b, tree.nodes, induced_assignment(tree, cut, root_label, other_label));
    if (info) *info = {a, b, attempt};
    return next;
  }
  throw Error(Errc::RetriesExhausted, "no balanced cut after " +
                                          std::to_string(config.max_tree_retries) +
                                          " trees on districts " + std::to_string(a) + "/" +
                                          std::to_string(b));
}

}  // namespace flowrecom
