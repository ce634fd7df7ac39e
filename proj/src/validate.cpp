#include "feedergen/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>

#include "feedergen/ingest.hpp"
#include "feedergen/reconstruct.hpp"

namespace feedergen {

namespace {

constexpr int kUncappedLevel = 1000000;

std::string outdeg_key(int d) { return d >= 5 ? std::string("5+") : std::to_string(d); }

}  // namespace

bool check_connected(const Matrix& a_binary, int head) {
  if (a_binary.rows() != a_binary.cols() || a_binary.rows() == 0) {
    throw std::invalid_argument("check_connected: expected a nonempty square matrix");
  }
  const int m = a_binary.rows();
  if (head < 0 || head >= m) {
    throw std::invalid_argument("check_connected: head out of range");
  }
  std::vector<char> seen(static_cast<size_t>(m), 0);
  std::deque<int> q{head};
  seen[static_cast<size_t>(head)] = 1;
  int reached = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    ++reached;
    for (int v = 0; v < m; ++v) {
      if (v == head || seen[static_cast<size_t>(v)]) continue;
      if (a_binary.at(u, v) != 0.0) {
        seen[static_cast<size_t>(v)] = 1;
        q.push_back(v);
      }
    }
  }
  return reached == m;
}

bool check_success(const FeederGraph& g) {
  for (const auto& [parent, child] : g.edges()) {
    if (phase_wire_count(g.node(child).phase) > phase_wire_count(g.node(parent).phase)) {
      return false;
    }
  }
  return true;
}

bool check_perfect(const FeederGraph& g) {
  for (const auto& [parent, child] : g.edges()) {
    if (!phase_is_subset(g.node(child).phase, g.node(parent).phase)) return false;
  }
  return true;
}

RateSet compute_rates(int m, const std::vector<FeederGraph>& candidates) {
  if (m <= 0) throw std::invalid_argument("compute_rates: node count must be positive");
  RateSet r;
  for (const FeederGraph& g : candidates) {
    r.connected += 1.0;
    if (check_success(g)) r.success += 1.0;
    if (check_perfect(g)) r.perfect += 1.0;
  }
  r.connected /= m;
  r.success /= m;
  r.perfect /= m;
  return r;
}

RateSet pipeline_rates(const SoftGraph& sg, const FeatureScales& scales,
                       const std::vector<double>& normamps_table) {
  const int m = sg.a_soft.rows();
  const Matrix a_bin = reconstruct_adjacency(sg.a_soft);
  const std::vector<CandidateTopology> cands = permute_feeder_head(a_bin);
  const std::vector<DeviceAttributes> attrs = reconstruct_attributes(sg, scales, normamps_table);
  std::vector<FeederGraph> graphs;
  graphs.reserve(cands.size());
  std::vector<Phase> phases(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) phases[static_cast<size_t>(i)] = attrs[static_cast<size_t>(i)].phase;
  for (const CandidateTopology& c : cands) {
    graphs.push_back(realize_feeder(c, m, attrs, phases));
  }
  return compute_rates(m, graphs);
}

RateSet random_baseline(int m, int trials, uint64_t seed) {
  if (m <= 0 || trials <= 0) {
    throw std::invalid_argument("random_baseline: node count and trials must be positive");
  }
  const FeatureScales scales;  // default physical ranges
  RateSet acc;
  for (int t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(seed, static_cast<uint64_t>(t)));
    SoftGraph sg;
    sg.a_soft = Matrix(m, m);
    sg.x_num = Matrix(m, FeatureScales::kFeatureCount);
    sg.x_cat_level = Matrix(m, kLevelOneHot);
    sg.x_cat_phase = Matrix(m, kPhaseCount);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) sg.a_soft.at(i, j) = rng.uniform01();
      for (int j = 0; j < FeatureScales::kFeatureCount; ++j)
        sg.x_num.at(i, j) = rng.uniform(-1.0, 1.0);
      for (int j = 0; j < kLevelOneHot; ++j) sg.x_cat_level.at(i, j) = rng.uniform01();
      for (int j = 0; j < kPhaseCount; ++j) sg.x_cat_phase.at(i, j) = rng.uniform01();
    }
    const RateSet r = pipeline_rates(sg, scales);
    acc.connected += r.connected;
    acc.success += r.success;
    acc.perfect += r.perfect;
  }
  acc.connected /= trials;
  acc.success /= trials;
  acc.perfect /= trials;
  return acc;
}

double LengthHistogram::sample(Rng& rng) const {
  if (empty() || edges.size() != fractions.size() + 1) {
    throw std::logic_error("LengthHistogram::sample: malformed histogram");
  }
  const double u = rng.uniform01();
  double cum = 0.0;
  size_t bin = fractions.size() - 1;
  for (size_t k = 0; k < fractions.size(); ++k) {
    cum += fractions[k];
    if (u < cum) {
      bin = k;
      break;
    }
  }
  const double lo = edges[bin];
  const double hi = edges[bin + 1];
  return hi > lo ? rng.uniform(lo, hi) : lo;
}

std::vector<double> equal_width_edges(double lo, double hi, int bins) {
  if (bins <= 0 || !(hi > lo)) {
    throw std::invalid_argument("equal_width_edges: need bins > 0 and hi > lo");
  }
  std::vector<double> edges(static_cast<size_t>(bins) + 1);
  const double w = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) edges[static_cast<size_t>(k)] = lo + w * k;
  edges.back() = hi;
  return edges;
}

LengthHistogram histogram_of(const std::vector<double>& lengths, const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram_of: need at least two edges");
  LengthHistogram h;
  h.edges = edges;
  h.fractions.assign(edges.size() - 1, 0.0);
  if (lengths.empty()) return h;
  const int bins = static_cast<int>(h.fractions.size());
  const double lo = edges.front();
  const double hi = edges.back();
  const double w = (hi - lo) / bins;
  for (double v : lengths) {
    int k = w > 0.0 ? static_cast<int>(std::floor((v - lo) / w)) : 0;
    k = std::clamp(k, 0, bins - 1);  // out-of-range mass goes to the end bins
    h.fractions[static_cast<size_t>(k)] += 1.0;
  }
  for (double& f : h.fractions) f /= static_cast<double>(lengths.size());
  return h;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double s = 0.0;
  for (size_t k = 0; k < p.size(); ++k) s += std::fabs(p[k] - q[k]);
  return 0.5 * s;
}

std::map<std::string, double> phase_fractions(const FeederGraph& g) {
  std::map<std::string, double> f;
  for (int p = 0; p < kPhaseCount; ++p) f[phase_name(phase_from_index(p))] = 0.0;
  for (const DeviceNode& n : g.nodes()) f[phase_name(n.phase)] += 1.0;
  for (auto& kv : f) kv.second /= g.size();
  return f;
}

std::map<std::string, double> outdeg_fractions(const FeederGraph& g) {
  std::map<std::string, double> f;
  for (int d = 0; d <= 5; ++d) f[outdeg_key(d)] = 0.0;
  for (const DeviceNode& n : g.nodes()) f[outdeg_key(g.out_degree(n.id))] += 1.0;
  for (auto& kv : f) kv.second /= g.size();
  return f;
}

EmpiricalStats EmpiricalStats::defaults() {
  EmpiricalStats s;
  s.max_level = 10;
  s.phase_fraction["a"] = {0.18, 0.28};
  s.phase_fraction["b"] = {0.18, 0.28};
  s.phase_fraction["c"] = {0.18, 0.28};
  s.phase_fraction["ab"] = {0.01, 0.03};
  s.phase_fraction["ac"] = {0.01, 0.03};
  s.phase_fraction["bc"] = {0.01, 0.03};
  s.phase_fraction["abc"] = {0.20, 0.25};
  s.outdeg_fraction["0"] = {0.20, 0.40};
  s.outdeg_fraction["1"] = {0.25, 0.45};
  s.outdeg_fraction["2"] = {0.18, 0.26};
  s.outdeg_fraction["3"] = {0.05, 0.07};
  s.outdeg_fraction["4"] = {0.01, 0.03};
  s.outdeg_fraction["5+"] = {0.00, 0.01};
  s.tv_threshold = 0.3;
  return s;
}

EmpiricalStats EmpiricalStats::from_corpus(const std::vector<FeederGraph>& graphs, int bins) {
  if (graphs.empty()) throw std::invalid_argument("EmpiricalStats::from_corpus: empty corpus");
  EmpiricalStats s;
  s.max_level = 10;
  s.tv_threshold = 0.3;
  s.level_range_lo = kUncappedLevel;
  s.level_range_hi = 0;

  bool first = true;
  std::vector<double> all_lengths;
  for (const FeederGraph& g : graphs) {
    const FeederGraph deep = compute_topological_features(g, kUncappedLevel);
    int feeder_max = 0;
    for (const DeviceNode& n : deep.nodes()) feeder_max = std::max(feeder_max, n.level);
    s.level_range_lo = std::min(s.level_range_lo, feeder_max);
    s.level_range_hi = std::max(s.level_range_hi, feeder_max);
    const auto pf = phase_fractions(g);
    const auto df = outdeg_fractions(g);
    if (first) {
      for (const auto& [k, v] : pf) s.phase_fraction[k] = {v, v};
      for (const auto& [k, v] : df) s.outdeg_fraction[k] = {v, v};
      first = false;
    } else {
      for (const auto& [k, v] : pf) {
        FractionRange& r = s.phase_fraction[k];
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
      }
      for (const auto& [k, v] : df) {
        FractionRange& r = s.outdeg_fraction[k];
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
      }
    }
    for (const DeviceNode& n : g.nodes()) all_lengths.push_back(n.length);
  }

  double max_len = 0.0;
  for (double v : all_lengths) max_len = std::max(max_len, v);
  if (max_len <= 0.0) max_len = 1.0;
  s.length_hist = histogram_of(all_lengths, equal_width_edges(0.0, max_len, bins));
  return s;
}

ScreenResult empirical_screen(const FeederGraph& g, const EmpiricalStats& stats) {
  ScreenResult res;
  char buf[160];

  const FeederGraph deep = compute_topological_features(g, kUncappedLevel);
  int max_level = 0;
  for (const DeviceNode& n : deep.nodes()) max_level = std::max(max_level, n.level);
  if (max_level > stats.max_level) {
    std::snprintf(buf, sizeof(buf), "level: max hierarchy level %d exceeds %d", max_level,
                  stats.max_level);
    res.pass = false;
    res.reasons.emplace_back(buf);
  }

  const auto pf = phase_fractions(g);
  for (const auto& [key, range] : stats.phase_fraction) {
    const auto it = pf.find(key);
    const double v = it == pf.end() ? 0.0 : it->second;
    if (!range.contains(v)) {
      std::snprintf(buf, sizeof(buf), "phase %s: node fraction %.4f outside [%.4f, %.4f]",
                    key.c_str(), v, range.lo, range.hi);
      res.pass = false;
      res.reasons.emplace_back(buf);
    }
  }

  const auto df = outdeg_fractions(g);
  for (const auto& [key, range] : stats.outdeg_fraction) {
    const auto it = df.find(key);
    const double v = it == df.end() ? 0.0 : it->second;
    if (!range.contains(v)) {
      std::snprintf(buf, sizeof(buf), "out-degree %s: node fraction %.4f outside [%.4f, %.4f]",
                    key.c_str(), v, range.lo, range.hi);
      res.pass = false;
      res.reasons.emplace_back(buf);
    }
  }

  if (!stats.length_hist.empty()) {
    std::vector<double> lengths;
    lengths.reserve(static_cast<size_t>(g.size()));
    for (const DeviceNode& n : g.nodes()) lengths.push_back(n.length);
    const LengthHistogram mine = histogram_of(lengths, stats.length_hist.edges);
    const double tv = tv_distance(mine.fractions, stats.length_hist.fractions);
    if (tv > stats.tv_threshold) {
      std::snprintf(buf, sizeof(buf), "length: histogram distance %.4f exceeds %.4f", tv,
                    stats.tv_threshold);
      res.pass = false;
      res.reasons.emplace_back(buf);
    }
  }

  return res;
}

FeederGraph regenerate_lengths(const FeederGraph& g, const LengthHistogram& hist, uint64_t seed) {
  if (hist.empty()) throw std::invalid_argument("regenerate_lengths: empty histogram");
  Rng rng(seed);
  std::vector<DeviceNode> nodes = g.nodes();
  for (DeviceNode& n : nodes) n.length = hist.sample(rng);
  return compute_topological_features(g.with_nodes(nodes), kLevelCap);
}

}  // namespace feedergen
