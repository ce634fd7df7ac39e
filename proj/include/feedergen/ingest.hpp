#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "feedergen/graph.hpp"
#include "feedergen/matrix.hpp"

namespace feedergen {

// A feeder model as read from a file: named devices strung between named
// buses, one source bus. Order of devices is file order.
struct RawDevice {
  std::string name;
  std::string from_bus;
  std::string to_bus;
  Phase phase = Phase::ABC;
  double length_m = 0.0;
  double norm_amps = 0.0;
  double xfmr_kva = 0.0;
  int line = 0;  // source line, for diagnostics
};

struct RawFeederModel {
  std::string source_bus;
  std::vector<std::string> buses;  // source first, then to-buses in file order
  std::vector<RawDevice> devices;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Line-oriented feeder format:
//   source <bus>
//   device <name> from=<bus> to=<bus> phase=<p> length_m=<f> normamps=<f> [xfmr_kva=<f>]
// '#' starts a comment; blank lines ignored; statements are order-independent.
// A bus is declared by being the source or some device's to-bus; a from-bus
// that is neither is an error. Duplicate device names and duplicate source
// statements are errors. Unknown keys are skipped, one warning each.
RawFeederModel parse_feeder_file(std::string_view text, std::vector<std::string>* warnings = nullptr);

RawFeederModel parse_feeder_path(const std::string& path, std::vector<std::string>* warnings = nullptr);

// Device-as-node transform: each device becomes a node; an edge i->j exists
// where device i's to-bus is device j's from-bus. The head is the single
// device leaving the source bus. Rejects (std::invalid_argument) any model
// whose device graph is not radial, citing the violated assumption.
FeederGraph device_as_node(const RawFeederModel& raw);

// Derive distance, pseudo_load and level from the structure and organic
// attributes. Level increments at a bifurcation child whose norm_amps or
// phase differ from the parent's, capped at level_cap.
FeederGraph compute_topological_features(const FeederGraph& g, int level_cap = 10);

// Row-normalized adjacency with self-loops: N = D^-1 (A + I) where
// D_ii = 1 + sum_j A_ij. Rows sum to 1 exactly up to rounding.
Matrix normalize_adjacency(const Matrix& a);

// Binary adjacency of a graph: A[u][v] = 1 for each edge u->v.
Matrix adjacency_of(const FeederGraph& g);

struct FeatureRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Scaling ranges for the four numerical features, in tensor column order.
struct FeatureScales {
  FeatureRange length{0.0, 800.0};
  FeatureRange norm_amps{0.0, 800.0};
  FeatureRange distance{0.0, 10000.0};
  FeatureRange pseudo_load{0.0, 10000.0};

  static constexpr int kFeatureCount = 4;
  const FeatureRange& range(int feature) const;
  FeatureRange& range(int feature);
  static const char* feature_name(int feature);

  // Upper bounds from the corpus maxima; lower bounds pinned at 0 so that
  // downstream subgraphs (smaller distance / pseudo_load) stay encodable.
  static FeatureScales from_corpus(const std::vector<FeederGraph>& graphs);
};

// Affine map [lo,hi] -> [-1,1]; collapsed ranges (hi <= lo) encode to 0.
double encode_feature(double value, const FeatureRange& r);
// Inverse map [-1,1] -> [lo,hi]; collapsed ranges decode to lo.
double decode_feature(double score, const FeatureRange& r);

inline constexpr int kLevelCap = 10;            // one-hot width kLevelCap+1
inline constexpr int kLevelOneHot = kLevelCap + 1;

// Tensor bundle the networks consume.
struct GraphTensors {
  Matrix a_norm;        // m x m, row-normalized adjacency with self-loops
  Matrix x_num;         // m x 4: length, norm_amps, distance, pseudo_load in [-1,1]
  Matrix x_cat_level;   // m x 11 one-hot
  Matrix x_cat_phase;   // m x 7 one-hot
  int head_index = 0;
};

// Encode a fully featured graph. A feature value outside its declared range
// is an error naming the feature.
GraphTensors encode_attributes(const FeederGraph& g, const FeatureScales& scales);

}  // namespace feedergen
