#include "feedergen/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "feedergen/ingest.hpp"
#include "feedergen/layout.hpp"
#include "feedergen/reconstruct.hpp"

namespace feedergen {

namespace {

constexpr int kMaxOutDegree = 4;
constexpr int kLevelGuard = 8;  // stop attribute drops beyond this hierarchy depth

struct DegreeMix {
  int n0 = 0, n1 = 0, n2 = 0, n3 = 0, n4 = 0;
};

// Pick per-degree node counts close to the reference out-degree fractions
// (degree 0: 20-40%, 1: 25-45%, 2: 18-26%, 3: 5-7%, 4: 1-3%) subject to the
// tree identity n1 + 2*n2 + 3*n3 + 4*n4 = m - 1.
DegreeMix pick_degree_mix(int m, Rng& rng) {
  std::vector<DegreeMix> valid;
  DegreeMix nearest;
  double nearest_score = 1e300;
  // ceil/floor keep the realized fractions inside the bands; where rounding
  // leaves no integer in a band (small m), widen to the enclosing integers.
  int lo2 = std::max(1, static_cast<int>(std::ceil(0.18 * m)));
  int hi2 = static_cast<int>(std::floor(0.26 * m));
  if (lo2 > hi2) hi2 = lo2;
  int lo3 = std::max(0, static_cast<int>(std::ceil(0.05 * m)));
  int hi3 = static_cast<int>(std::floor(0.07 * m));
  if (lo3 > hi3) {
    lo3 = std::max(0, static_cast<int>(std::floor(0.05 * m)));
    hi3 = static_cast<int>(std::ceil(0.07 * m));
  }
  const int hi4 = std::max(0, static_cast<int>(std::floor(0.03 * m)));
  for (int n2 = lo2; n2 <= hi2; ++n2) {
    for (int n3 = lo3; n3 <= hi3; ++n3) {
      for (int n4 = 0; n4 <= hi4; ++n4) {
        const int n1 = (m - 1) - (2 * n2 + 3 * n3 + 4 * n4);
        if (n1 < 0) continue;
        const int n0 = m - n1 - n2 - n3 - n4;
        if (n0 < 1) continue;
        DegreeMix mix{n0, n1, n2, n3, n4};
        const double f0 = static_cast<double>(n0) / m;
        const double f1 = static_cast<double>(n1) / m;
        const double score = std::fabs(f0 - 0.30) + std::fabs(f1 - 0.35);
        if (f0 >= 0.20 && f0 <= 0.40 && f1 >= 0.25 && f1 <= 0.45) {
          valid.push_back(mix);
        }
        if (score < nearest_score) {
          nearest_score = score;
          nearest = mix;
        }
      }
    }
  }
  if (!valid.empty()) return valid[static_cast<size_t>(rng.below(valid.size()))];
  if (nearest.n0 + nearest.n1 + nearest.n2 + nearest.n3 + nearest.n4 != m) {
    throw std::invalid_argument("make_synthetic_feeder: no feasible degree mix for m=" +
                                std::to_string(m));
  }
  return nearest;
}

int table_index(double amps, const std::vector<double>& table) {
  for (size_t i = 0; i < table.size(); ++i) {
    if (table[i] == amps) return static_cast<int>(i);
  }
  return static_cast<int>(table.size()) - 1;
}

}  // namespace

FeederGraph make_synthetic_feeder(int m, Rng& rng) {
  if (m < 8) throw std::invalid_argument("make_synthetic_feeder: need at least 8 devices");

  // --- topology: random tree realizing an exact out-degree multiset ---
  std::vector<int> parent, degree;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const DegreeMix mix = pick_degree_mix(m, rng);
    std::vector<int> pool;  // unassigned degrees
    pool.insert(pool.end(), static_cast<size_t>(mix.n0), 0);
    pool.insert(pool.end(), static_cast<size_t>(mix.n1), 1);
    pool.insert(pool.end(), static_cast<size_t>(mix.n2), 2);
    pool.insert(pool.end(), static_cast<size_t>(mix.n3), 3);
    pool.insert(pool.end(), static_cast<size_t>(mix.n4), 4);

    parent.assign(static_cast<size_t>(m), -1);
    degree.assign(static_cast<size_t>(m), 0);

    auto take_degree = [&](bool need_nonzero) -> int {
      std::vector<size_t> options;
      for (size_t i = 0; i < pool.size(); ++i) {
        if (!need_nonzero || pool[i] > 0) options.push_back(i);
      }
      if (options.empty()) return -1;
      const size_t pick = options[static_cast<size_t>(rng.below(options.size()))];
      const int d = pool[pick];
      pool[pick] = pool.back();
      pool.pop_back();
      return d;
    };

    // The head feeds a single trunk; its slot units seed the attachment pool.
    degree[0] = take_degree(true);
    std::vector<int> slots(static_cast<size_t>(degree[0]), 0);  // one entry per open slot
    bool ok = true;
    for (int v = 1; v < m && ok; ++v) {
      if (slots.empty()) {
        ok = false;
        break;
      }
      const size_t si = static_cast<size_t>(rng.below(slots.size()));
      parent[static_cast<size_t>(v)] = slots[si];
      slots[si] = slots.back();
      slots.pop_back();
      const bool need_nonzero = slots.empty() && v < m - 1;
      const int d = take_degree(need_nonzero);
      if (d < 0) {
        ok = false;
        break;
      }
      degree[static_cast<size_t>(v)] = d;
      slots.insert(slots.end(), static_cast<size_t>(d), v);
    }
    if (ok && slots.empty()) break;
    parent.clear();
    if (attempt == 99) {
      throw std::runtime_error("make_synthetic_feeder: could not realize a degree sequence");
    }
  }

  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> children(static_cast<size_t>(m));
  for (int v = 1; v < m; ++v) {
    edges.emplace_back(parent[static_cast<size_t>(v)], v);
    children[static_cast<size_t>(parent[static_cast<size_t>(v)])].push_back(v);
  }

  // Subtree sizes pick which child continues the trunk at each bifurcation.
  std::vector<int> subtree(static_cast<size_t>(m), 1);
  for (int v = m - 1; v >= 1; --v) {
    subtree[static_cast<size_t>(parent[static_cast<size_t>(v)])] += subtree[static_cast<size_t>(v)];
  }

  // --- attributes ---
  // Three-phase backbone: every device whose subtree still serves at least
  // region_min devices. The set is connected (a parent's subtree strictly
  // contains its child's), reaches down every major run, and caps each
  // single-phase lateral at region_min - 1 devices, so no letter can
  // dominate a feeder. Ratings step down entering a lateral, at every
  // bifurcation inside one, and now and then along the backbone, so the
  // hierarchy level deepens with the branching structure.
  const std::vector<double>& amps_table = default_normamps_table();
  std::vector<DeviceNode> nodes(static_cast<size_t>(m));

  // Smallest cutoff whose region stays within the three-phase device quota:
  // with sizes sorted descending, any cutoff above sizes[cap] admits at most
  // cap devices. The cutoff is also capped so no single-phase lateral gets
  // large enough to unbalance the letters, even on trunk-heavy topologies
  // (where the backbone then simply runs deeper than the quota).
  const int cap = static_cast<int>(std::ceil(m * rng.uniform(0.22, 0.28)));
  std::vector<int> sizes(subtree);
  std::sort(sizes.begin(), sizes.end(), std::greater<int>());
  const int region_min =
      std::min(std::max(5, m / 8), std::max(2, sizes[static_cast<size_t>(cap)] + 1));
  std::vector<char> in_region(static_cast<size_t>(m), 0);
  for (int v = 0; v < m; ++v) {
    in_region[static_cast<size_t>(v)] = subtree[static_cast<size_t>(v)] >= region_min ? 1 : 0;
  }

  // Stratified conductor lengths: fixed per-feeder counts per length band
  // keep every feeder's histogram close to the corpus-wide mixture.
  std::vector<double> lengths(static_cast<size_t>(m));
  {
    const int n_short = static_cast<int>(std::lround(0.70 * m));
    const int n_med = std::min(m - n_short, static_cast<int>(std::lround(0.25 * m)));
    int i = 0;
    for (; i < n_short; ++i) lengths[static_cast<size_t>(i)] = rng.uniform(20.0, 250.0);
    for (; i < n_short + n_med; ++i) lengths[static_cast<size_t>(i)] = rng.uniform(250.0, 550.0);
    for (; i < m; ++i) lengths[static_cast<size_t>(i)] = rng.uniform(550.0, 800.0);
    for (int k = m - 1; k > 0; --k) {
      const int j = static_cast<int>(rng.below(static_cast<uint64_t>(k) + 1));
      std::swap(lengths[static_cast<size_t>(k)], lengths[static_cast<size_t>(j)]);
    }
  }

  // Lateral roots take phases that balance the per-letter device counts,
  // with a small quota of two-phase laterals on the tiniest subtrees.
  std::vector<int> laterals;
  for (int v = 0; v < m; ++v) {
    if (!in_region[static_cast<size_t>(v)]) continue;
    for (int c : children[static_cast<size_t>(v)]) {
      if (!in_region[static_cast<size_t>(c)]) laterals.push_back(c);
    }
  }
  std::sort(laterals.begin(), laterals.end(), [&](int a, int b) {
    if (subtree[static_cast<size_t>(a)] != subtree[static_cast<size_t>(b)]) {
      return subtree[static_cast<size_t>(a)] > subtree[static_cast<size_t>(b)];
    }
    return a < b;
  });
  static const Phase kSingles[] = {Phase::A, Phase::B, Phase::C};
  static const Phase kPairs[] = {Phase::AB, Phase::AC, Phase::BC};
  double letter_nodes[3] = {0.0, 0.0, 0.0};
  int tie_rotor = static_cast<int>(rng.below(3));
  int pair_rotor = static_cast<int>(rng.below(3));
  int pair_nodes = 0;
  const int pair_budget = std::max(1, static_cast<int>(std::lround(0.02 * m)));
  std::vector<Phase> root_phase(static_cast<size_t>(m), Phase::ABC);
  auto scarcest_letter = [&](int mask) {
    int pick = -1;
    for (int b = 0; b < 3; ++b) {
      if (!(mask & (1 << b))) continue;
      if (pick < 0 || letter_nodes[b] < letter_nodes[pick]) pick = b;
    }
    int ties = 0;
    for (int b = 0; b < 3; ++b) {
      if ((mask & (1 << b)) && letter_nodes[b] == letter_nodes[pick]) ++ties;
    }
    if (ties > 1) {
      int skip = tie_rotor++ % ties;
      for (int b = 0; b < 3; ++b) {
        if ((mask & (1 << b)) && letter_nodes[b] == letter_nodes[pick] && skip-- == 0) {
          pick = b;
          break;
        }
      }
    }
    return pick;
  };
  for (int root : laterals) {
    const int sz = subtree[static_cast<size_t>(root)];
    if (sz <= 2 && pair_nodes + sz <= pair_budget) {
      const Phase p = kPairs[pair_rotor++ % 3];
      root_phase[static_cast<size_t>(root)] = p;
      pair_nodes += sz;
      const int mask = phase_letters(p);
      for (int b = 0; b < 3; ++b) {
        if (mask & (1 << b)) letter_nodes[b] += 0.5 * sz;
      }
      continue;
    }
    const int b = scarcest_letter(0x7);
    root_phase[static_cast<size_t>(root)] = kSingles[b];
    letter_nodes[b] += sz;
  }

  std::vector<int> depth(static_cast<size_t>(m), 0);  // bifurcation-change depth
  nodes[0].phase = Phase::ABC;
  nodes[0].norm_amps = amps_table.back();
  for (int v = 0; v < m; ++v) {  // ids are in attachment order: parents precede children
    DeviceNode& n = nodes[static_cast<size_t>(v)];
    n.id = v;
    n.length = lengths[static_cast<size_t>(v)];
    n.xfmr_kva = 0.0;
    if (children[static_cast<size_t>(v)].empty()) {
      static const double kva_options[] = {15.0, 25.0, 37.5, 50.0, 75.0};
      n.xfmr_kva = kva_options[rng.below(5)];
    }
    if (v == 0) continue;

    const int p = parent[static_cast<size_t>(v)];
    const DeviceNode& pn = nodes[static_cast<size_t>(p)];
    const bool bifurcates = children[static_cast<size_t>(p)].size() >= 2;
    const bool guard = depth[static_cast<size_t>(p)] >= kLevelGuard;
    if (in_region[static_cast<size_t>(v)]) {  // backbone stays three-phase
      n.phase = Phase::ABC;
      n.norm_amps = pn.norm_amps;
      if (bifurcates && !guard && rng.uniform01() < 0.35) {
        const int idx = table_index(pn.norm_amps, amps_table);
        n.norm_amps = amps_table[static_cast<size_t>(std::max(0, idx - 1))];
      }
    } else if (in_region[static_cast<size_t>(p)]) {  // entering a lateral
      n.phase = root_phase[static_cast<size_t>(v)];
      const int idx = table_index(pn.norm_amps, amps_table);
      const int step = 1 + static_cast<int>(rng.below(2));
      n.norm_amps = amps_table[static_cast<size_t>(std::max(0, idx - step))];
    } else {  // inside a lateral
      n.phase = pn.phase;
      n.norm_amps = pn.norm_amps;
      if (bifurcates && !guard) {
        if (phase_wire_count(pn.phase) == 2) {
          n.phase = kSingles[scarcest_letter(phase_letters(pn.phase))];
        }
        const int idx = table_index(pn.norm_amps, amps_table);
        n.norm_amps = amps_table[static_cast<size_t>(std::max(0, idx - 1))];
      }
    }
    const bool changed = n.phase != pn.phase || n.norm_amps != pn.norm_amps;
    depth[static_cast<size_t>(v)] =
        depth[static_cast<size_t>(p)] + ((bifurcates && changed) ? 1 : 0);
  }

  FeederGraph g(nodes, edges, 0);
  return compute_topological_features(g, kLevelCap);
}

std::vector<FeederGraph> make_corpus(int count, int min_nodes, int max_nodes, uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_corpus: count must be >= 1");
  if (min_nodes < 8 || max_nodes < min_nodes) {
    throw std::invalid_argument("make_corpus: need 8 <= min_nodes <= max_nodes");
  }
  std::vector<FeederGraph> out;
  out.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng(Rng::derive(seed, static_cast<uint64_t>(k)));
    const int m = min_nodes + static_cast<int>(rng.below(
                                  static_cast<uint64_t>(max_nodes - min_nodes + 1)));
    out.push_back(make_synthetic_feeder(m, rng));
  }
  return out;
}

std::vector<std::string> write_corpus(const std::string& dir,
                                      const std::vector<FeederGraph>& graphs) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (size_t k = 0; k < graphs.size(); ++k) {
    char name[40];
    std::snprintf(name, sizeof(name), "corpus_%03zu.feeder", k);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write feeder file: " + path);
    out << export_feeder_model(graphs[k]);
    names.emplace_back(name);
  }
  return names;
}

}  // namespace feedergen
