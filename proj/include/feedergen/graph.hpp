#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace feedergen {

// Phase make-up of a device. The enumerator order fixes the one-hot slot
// order everywhere (encoding, generator output, reconstruction argmax).
enum class Phase { A, B, C, AB, AC, BC, ABC };

inline constexpr int kPhaseCount = 7;

// Bitmask of present phase wires: a=1, b=2, c=4.
int phase_letters(Phase p);
// Number of phase wires (1, 2 or 3).
int phase_wire_count(Phase p);
// True when every wire of `child` is present in `parent`.
bool phase_is_subset(Phase child, Phase parent);

const char* phase_name(Phase p);
std::optional<Phase> phase_from_name(const std::string& s);
Phase phase_from_index(int i);

// One device of a feeder, modelled as a graph node. Organic attributes come
// from the source model; topological ones (distance, pseudo_load, level) are
// derived by compute_topological_features and start zeroed.
struct DeviceNode {
  int id = 0;
  double length = 0.0;       // meters
  double norm_amps = 0.0;    // rated amps
  double xfmr_kva = 0.0;     // own transformer capacity, 0 for non-transformers
  Phase phase = Phase::ABC;
  double distance = 0.0;     // path length from head, inclusive of own length
  double pseudo_load = 0.0;  // own + downstream transformer kVA
  int level = 0;             // hierarchy level, capped at level_cap
};

// Directed rooted graph of devices. Node ids are dense 0..m-1. Construction
// freezes the structure; attribute updates go through with_nodes().
class FeederGraph {
 public:
  FeederGraph(std::vector<DeviceNode> nodes, const std::vector<std::pair<int, int>>& edges,
              int head);

  int size() const { return static_cast<int>(nodes_.size()); }
  int head() const { return head_; }
  int edge_count() const { return edge_count_; }

  const DeviceNode& node(int id) const;
  const std::vector<DeviceNode>& nodes() const { return nodes_; }

  // Children in ascending id order.
  const std::vector<int>& children(int id) const;
  // Parent id, or -1 when the node has no incoming edge. Multiple incoming
  // edges keep the last one here; validate_radial reports such graphs.
  int parent(int id) const;
  int out_degree(int id) const { return static_cast<int>(children(id).size()); }

  // All edges, sorted (tail, then head of edge).
  std::vector<std::pair<int, int>> edges() const;

  // Same structure, replacement attributes. Node count must match; ids are
  // reassigned 0..m-1 in the given order.
  FeederGraph with_nodes(std::vector<DeviceNode> nodes) const;

 private:
  std::vector<DeviceNode> nodes_;
  std::vector<std::vector<int>> children_;
  std::vector<int> parent_;
  int head_ = 0;
  int edge_count_ = 0;
};

struct RadialViolation {
  enum class Kind { Cycle, Disconnected, InDegree, MultipleHeads };
  Kind kind;
  // Offending node for InDegree/MultipleHeads; edge tail/head for Cycle;
  // unreachable node list for Disconnected.
  int node = -1;
  std::pair<int, int> edge{-1, -1};
  std::vector<int> node_set;
  std::string detail;
};

// Structural checks for "radial feeder": single head, in-degree 1 elsewhere,
// no cycles, everything reachable from the head. Empty result == valid.
// Problems confined to the unreachable part are reported once, as the
// disconnection violation listing those nodes.
std::vector<RadialViolation> validate_radial(const FeederGraph& g);

// Every node strictly below v (v excluded), breadth-first, children visited
// in ascending id order. Throws std::out_of_range for an unknown id.
std::vector<int> downstream(const FeederGraph& g, int v);

// Fraction of nodes per out-degree; values sum to 1 for a non-empty graph.
std::map<int, double> out_degree_histogram(const FeederGraph& g);

}  // namespace feedergen
