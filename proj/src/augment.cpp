#include "feedergen/augment.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace feedergen {

std::optional<FeederGraph> sample_subgraph(const FeederGraph& g, int min_nodes, Rng& rng) {
  if (min_nodes < 1) throw std::invalid_argument("sample_subgraph: min_nodes must be >= 1");

  std::vector<int> starts;
  for (const DeviceNode& n : g.nodes()) {
    if (n.level <= 1) starts.push_back(n.id);
  }
  if (starts.empty()) {
    throw std::invalid_argument("sample_subgraph: feeder has no level-0 or level-1 node");
  }

  const int start = starts[static_cast<size_t>(rng.below(starts.size()))];
  std::vector<int> sub = downstream(g, start);
  sub.push_back(start);
  std::sort(sub.begin(), sub.end());

  const int count = static_cast<int>(sub.size());
  if (count < min_nodes) return std::nullopt;
  if (2 * count > g.size()) return std::nullopt;  // more than half of the original

  std::map<int, int> remap;  // original id -> new id, ascending
  for (int k = 0; k < count; ++k) remap[sub[static_cast<size_t>(k)]] = k;

  std::vector<DeviceNode> nodes;
  nodes.reserve(sub.size());
  for (int orig : sub) {
    DeviceNode n = g.node(orig);
    n.id = remap[orig];
    nodes.push_back(n);
  }
  std::vector<std::pair<int, int>> edges;
  for (int orig : sub) {
    for (int child : g.children(orig)) {
      edges.emplace_back(remap[orig], remap[child]);  // children stay inside the subtree
    }
  }
  FeederGraph out(nodes, edges, remap[start]);
  return compute_topological_features(out, kLevelCap);
}

Dataset build_dataset(const std::vector<FeederGraph>& sources,
                      const std::vector<std::string>& names, int target_count, int min_nodes,
                      uint64_t seed) {
  if (sources.empty()) throw std::invalid_argument("build_dataset: no source feeders");
  if (names.size() != sources.size()) {
    throw std::invalid_argument("build_dataset: one name per source feeder required");
  }
  if (target_count < static_cast<int>(sources.size())) {
    throw std::invalid_argument("build_dataset: target_count below the source feeder count");
  }

  Dataset ds;
  ds.scales = FeatureScales::from_corpus(sources);
  for (size_t i = 0; i < sources.size(); ++i) {
    ds.members.push_back(
        {sources[i], encode_attributes(sources[i], ds.scales), names[i]});
  }

  Rng rng(seed);
  std::vector<int> sub_counter(sources.size(), 0);
  long budget = 100L * target_count;
  while (static_cast<int>(ds.members.size()) < target_count) {
    if (budget-- <= 0) {
      throw std::runtime_error(
          "build_dataset: rejection budget exhausted after 100 x target_count draws; "
          "thresholds (min_nodes=" +
          std::to_string(min_nodes) + ", max 50%) admit no subgraph of these feeders");
    }
    const size_t src = static_cast<size_t>(rng.below(sources.size()));
    std::optional<FeederGraph> sub = sample_subgraph(sources[src], min_nodes, rng);
    if (!sub) continue;
    const int k = ++sub_counter[src];
    ds.members.push_back({*sub, encode_attributes(*sub, ds.scales),
                          names[src] + "+sub" + std::to_string(k)});
  }
  return ds;
}

}  // namespace feedergen
