#pragma once

#include <utility>
#include <vector>

#include "feedergen/graph.hpp"
#include "feedergen/ingest.hpp"
#include "feedergen/matrix.hpp"

namespace feedergen {

// Raw generator output: soft adjacency (column-stochastic) plus relaxed
// attribute blocks, all m-row.
struct SoftGraph {
  Matrix a_soft;       // m x m
  Matrix x_num;        // m x 4 in [-1,1]
  Matrix x_cat_level;  // m x 11, rows sum to 1
  Matrix x_cat_phase;  // m x 7, rows sum to 1
};

inline const std::vector<double>& default_normamps_table() {
  static const std::vector<double> t{100, 150, 200, 230, 300, 340, 400, 530, 600, 700};
  return t;
}

// Discretize a soft adjacency:
//   1. per symmetric pair keep the larger entry, zero the other (ties keep
//      the upper triangle); the diagonal is zeroed;
//   2. row-normalize surviving rows;
//   3. per column promote the largest surviving entry to 1 (ties to the
//      smallest row index).
// A column whose candidates all lost their duels keeps no entry — that node
// can only enter a topology as its head. Result: at most one 1 per column,
// never both directions of a pair.
Matrix reconstruct_adjacency(const Matrix& a_soft);

// One head choice over a discretized adjacency.
struct CandidateTopology {
  int head = -1;
  std::vector<std::pair<int, int>> edges;  // head's column removed
  int reached = 0;                         // nodes reachable from head
};

// Try every node with a nonzero row as head: drop its column, traverse, and
// keep the candidates whose traversal reaches all m nodes. Ordered by head id.
std::vector<CandidateTopology> permute_feeder_head(const Matrix& a_binary);

// Candidate as a graph with blank attributes (for traversal-based passes).
FeederGraph candidate_to_graph(const CandidateTopology& c, int m);

// Device-graph back to a bus model: bus "b<id>" under each device's tail,
// source bus feeding the head. Inverse of device_as_node up to renaming.
RawFeederModel node_to_edge(const FeederGraph& g);

// Physical attributes decoded for one node.
struct DeviceAttributes {
  double length = 0.0;
  double norm_amps = 0.0;
  Phase phase = Phase::ABC;
  int level = 0;  // reported only; recomputed from structure downstream
};

// Decode the numerical block through the scales (all four columns).
Matrix decode_numeric(const Matrix& x_num, const FeatureScales& scales);

// Per-node physical attributes: length via the scales, norm_amps snapped to
// the nearest table entry (ties to the smaller), phase and level by row
// argmax (ties to the smallest index).
std::vector<DeviceAttributes> reconstruct_attributes(const SoftGraph& sg,
                                                     const FeatureScales& scales,
                                                     const std::vector<double>& normamps_table =
                                                         default_normamps_table());

// Hierarchy-guided phases: the head gets abc; a chain child keeps its parent
// phase; at a bifurcation every child takes the admissible phase (subset of
// the parent's wires) with the highest score in phase_scores (m x 7), ties to
// the smallest phase index. Result always passes the containment check.
std::vector<Phase> assign_phases_guided(const FeederGraph& topology, const Matrix& phase_scores);

// Assemble a feeder from a candidate topology plus decoded attributes and
// phases, then derive the topological features.
FeederGraph realize_feeder(const CandidateTopology& c, int m,
                           const std::vector<DeviceAttributes>& attrs,
                           const std::vector<Phase>& phases, int level_cap = kLevelCap);

}  // namespace feedergen
