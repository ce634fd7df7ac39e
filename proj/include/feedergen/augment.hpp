#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feedergen/graph.hpp"
#include "feedergen/ingest.hpp"
#include "feedergen/rng.hpp"

namespace feedergen {

// Draw one downstream subgraph: the start node is chosen uniformly among
// nodes at hierarchy level 0 or 1, and the draw is rejected when the subtree
// below it (start included) has fewer than min_nodes nodes or more than half
// of the source feeder. Node ids are renumbered by ascending original id and
// the topological features are rederived from the new head. Returns nothing
// when the draw was rejected.
std::optional<FeederGraph> sample_subgraph(const FeederGraph& g, int min_nodes, Rng& rng);

struct DatasetMember {
  FeederGraph graph;
  GraphTensors tensors;
  std::string origin;  // source feeder name, "+sub<k>" suffix for subgraphs
};

struct Dataset {
  std::vector<DatasetMember> members;
  FeatureScales scales;
};

// Assemble the training set: every source feeder plus sampled subgraphs until
// target_count members exist (or the rejection budget of 100 * target_count
// draws runs out). Scales are fit on the source feeders only, before
// augmentation, and every member is encoded with them.
Dataset build_dataset(const std::vector<FeederGraph>& sources,
                      const std::vector<std::string>& names, int target_count, int min_nodes,
                      uint64_t seed);

}  // namespace feedergen
