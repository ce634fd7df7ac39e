#pragma once

#include <map>
#include <string>
#include <vector>

#include "feedergen/graph.hpp"
#include "feedergen/matrix.hpp"
#include "feedergen/reconstruct.hpp"
#include "feedergen/rng.hpp"

namespace feedergen {

// Can every node be reached from `head` over the binary adjacency once the
// head's own column is removed?
bool check_connected(const Matrix& a_binary, int head);

// Ampacity monotonicity: every child's conductor rating is at most its
// parent's.
bool check_success(const FeederGraph& g);

// Phase containment: every child's phase letters are a subset of its
// parent's. Implies the wire-count check.
bool check_perfect(const FeederGraph& g);

struct RateSet {
  double connected = 0.0;
  double success = 0.0;
  double perfect = 0.0;
};

// Fraction of the m possible head choices that produced a fully connected
// candidate, and of those, the fractions whose attribute checks hold. All
// three share the denominator m.
RateSet compute_rates(int m, const std::vector<FeederGraph>& candidates);

// Full reconstruction pipeline on one soft sample, scored with the raw
// row-argmax phases: discretize, enumerate heads, decode attributes, rate.
RateSet pipeline_rates(const SoftGraph& sg, const FeatureScales& scales,
                       const std::vector<double>& normamps_table = default_normamps_table());

// Rates for adjacency matrices drawn uniformly from [0,1]^(m x m) with
// uniformly random phase scores, discretized and attributed through the same
// pipeline as generated output, averaged over `trials` independent draws.
RateSet random_baseline(int m, int trials, uint64_t seed);

// Per-trial verdicts for one reconstruction: connected when at least one head
// candidate spans all nodes, success/perfect when some spanning candidate
// passes the corresponding check. compute_rates answers "how many of the m
// head choices work" (useful per instance); these answer "did this trial
// yield a usable feeder at all", the right footing for comparing a model --
// which commits to a single head per sample -- against diffuse random
// matrices that pick up several accidental heads each.
RateSet sample_verdicts(int m, const std::vector<FeederGraph>& candidates);

// Full reconstruction pipeline on one soft sample, aggregated as verdicts.
RateSet pipeline_sample_verdicts(const SoftGraph& sg, const FeatureScales& scales,
                                 const std::vector<double>& normamps_table =
                                     default_normamps_table());

// Same trial stream as random_baseline, averaged as per-trial verdicts.
RateSet random_baseline_samples(int m, int trials, uint64_t seed);

// Equal-width histogram support over conductor lengths.
struct LengthHistogram {
  std::vector<double> edges;      // k+1 ascending bin boundaries
  std::vector<double> fractions;  // k fractions summing to 1 (when non-empty)

  bool empty() const { return fractions.empty(); }
  double sample(Rng& rng) const;  // draw a length from the histogram
};

LengthHistogram histogram_of(const std::vector<double>& lengths, const std::vector<double>& edges);
std::vector<double> equal_width_edges(double lo, double hi, int bins);

// Total-variation distance between two fraction vectors of equal size.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

struct FractionRange {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// Per-feeder plausibility envelope, normally derived from a reference corpus.
struct EmpiricalStats {
  int max_level = 10;     // hard ceiling on the uncapped hierarchy level
  int level_range_lo = 4; // typical per-feeder max-level span (descriptive)
  int level_range_hi = 7;
  std::map<std::string, FractionRange> phase_fraction;    // keyed by phase name
  std::map<std::string, FractionRange> outdeg_fraction;   // "0".."4" and "5+"
  LengthHistogram length_hist;                            // corpus-wide
  double tv_threshold = 0.3;

  static EmpiricalStats defaults();
  // Observed inclusive ranges; coarse default binning keeps the per-feeder
  // histogram comparison well inside the threshold for 20-60 node feeders.
  static EmpiricalStats from_corpus(const std::vector<FeederGraph>& graphs, int bins = 4);
};

struct ScreenResult {
  bool pass = true;
  std::vector<std::string> reasons;
};

// Screen one feeder against the envelope: hierarchy levels are recomputed
// without the encoding cap and must stay within max_level; per-phase and
// per-out-degree node fractions must fall inside their ranges; the feeder's
// length histogram must sit within tv_threshold of the reference. Every
// violated rule contributes a reason.
ScreenResult empirical_screen(const FeederGraph& g, const EmpiricalStats& stats);

// Replace every conductor length with a fresh draw from the reference
// histogram (node id order), then rederive the topological features.
FeederGraph regenerate_lengths(const FeederGraph& g, const LengthHistogram& hist, uint64_t seed);

// Node fractions per phase name over a feeder.
std::map<std::string, double> phase_fractions(const FeederGraph& g);

// Node fractions per out-degree bucket ("0".."4", "5+").
std::map<std::string, double> outdeg_fractions(const FeederGraph& g);

}  // namespace feedergen
