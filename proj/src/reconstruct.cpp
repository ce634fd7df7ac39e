#include "feedergen/reconstruct.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>
#include <string>

namespace feedergen {

namespace {

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s: expected a nonempty square matrix, got %dx%d", who,
                  a.rows(), a.cols());
    throw std::invalid_argument(buf);
  }
}

int argmax_row(const Matrix& x, int r) {
  int best = 0;
  for (int j = 1; j < x.cols(); ++j) {
    if (x.at(r, j) > x.at(r, best)) best = j;
  }
  return best;
}

}  // namespace

Matrix reconstruct_adjacency(const Matrix& a_soft) {
  require_square(a_soft, "reconstruct_adjacency");
  const int m = a_soft.rows();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double v = a_soft.at(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("reconstruct_adjacency: entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") outside [0,1]");
      }
    }
  }
  Matrix w = a_soft;

  for (int i = 0; i < m; ++i) {
    w.at(i, i) = 0.0;
    for (int j = i + 1; j < m; ++j) {
      if (w.at(i, j) >= w.at(j, i)) {
        w.at(j, i) = 0.0;
      } else {
        w.at(i, j) = 0.0;
      }
    }
  }

  for (int i = 0; i < m; ++i) {
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += w.at(i, j);
    if (sum > 0.0) {
      for (int j = 0; j < m; ++j) w.at(i, j) /= sum;
    }
  }

  Matrix out(m, m);
  for (int j = 0; j < m; ++j) {
    int best = -1;
    for (int i = 0; i < m; ++i) {
      const double v = w.at(i, j);
      if (v > 0.0 && (best < 0 || v > w.at(best, j))) best = i;
    }
    if (best >= 0) out.at(best, j) = 1.0;
  }
  return out;
}

std::vector<CandidateTopology> permute_feeder_head(const Matrix& a_binary) {
  require_square(a_binary, "permute_feeder_head");
  const int m = a_binary.rows();

  std::vector<CandidateTopology> kept;
  for (int h = 0; h < m; ++h) {
    bool feeds_anything = false;
    for (int j = 0; j < m; ++j) {
      if (a_binary.at(h, j) != 0.0) {
        feeds_anything = true;
        break;
      }
    }
    if (!feeds_anything) continue;

    CandidateTopology c;
    c.head = h;
    std::vector<std::vector<int>> children(static_cast<size_t>(m));
    for (int u = 0; u < m; ++u) {
      for (int v = 0; v < m; ++v) {
        if (v == h) continue;  // nothing may feed the head
        if (a_binary.at(u, v) != 0.0) {
          c.edges.emplace_back(u, v);
          children[static_cast<size_t>(u)].push_back(v);
        }
      }
    }

    std::vector<char> seen(static_cast<size_t>(m), 0);
    std::deque<int> q{h};
    seen[static_cast<size_t>(h)] = 1;
    int reached = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      ++reached;
      for (int v : children[static_cast<size_t>(u)]) {
        if (!seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          q.push_back(v);
        }
      }
    }
    c.reached = reached;
    if (reached == m) kept.push_back(std::move(c));
  }
  return kept;
}

FeederGraph candidate_to_graph(const CandidateTopology& c, int m) {
  std::vector<DeviceNode> nodes(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) nodes[static_cast<size_t>(i)].id = i;
  return FeederGraph(nodes, c.edges, c.head);
}

RawFeederModel node_to_edge(const FeederGraph& g) {
  if (!validate_radial(g).empty()) {
    throw std::invalid_argument("node_to_edge: input graph is not radial");
  }
  RawFeederModel model;
  model.source_bus = "source";
  model.buses.push_back(model.source_bus);
  for (const DeviceNode& n : g.nodes()) {
    RawDevice d;
    d.name = "d" + std::to_string(n.id);
    d.from_bus = (n.id == g.head()) ? model.source_bus : "b" + std::to_string(g.parent(n.id));
    d.to_bus = "b" + std::to_string(n.id);
    d.phase = n.phase;
    d.length_m = n.length;
    d.norm_amps = n.norm_amps;
    d.xfmr_kva = n.xfmr_kva;
    model.buses.push_back(d.to_bus);
    model.devices.push_back(std::move(d));
  }
  return model;
}

Matrix decode_numeric(const Matrix& x_num, const FeatureScales& scales) {
  if (x_num.cols() != FeatureScales::kFeatureCount) {
    throw std::invalid_argument("decode_numeric: expected " +
                                std::to_string(FeatureScales::kFeatureCount) +
                                " numerical columns, got " + std::to_string(x_num.cols()));
  }
  Matrix out(x_num.rows(), x_num.cols());
  for (int r = 0; r < x_num.rows(); ++r) {
    for (int c = 0; c < x_num.cols(); ++c) {
      out.at(r, c) = decode_feature(x_num.at(r, c), scales.range(c));
    }
  }
  return out;
}

std::vector<DeviceAttributes> reconstruct_attributes(const SoftGraph& sg,
                                                     const FeatureScales& scales,
                                                     const std::vector<double>& normamps_table) {
  if (normamps_table.empty()) {
    throw std::invalid_argument("reconstruct_attributes: empty norm_amps table");
  }
  const int m = sg.x_num.rows();
  if (sg.x_cat_level.rows() != m || sg.x_cat_phase.rows() != m) {
    throw std::invalid_argument("reconstruct_attributes: attribute blocks disagree on node count");
  }
  if (sg.x_cat_phase.cols() != kPhaseCount) {
    throw std::invalid_argument("reconstruct_attributes: phase block must have " +
                                std::to_string(kPhaseCount) + " columns");
  }

  const Matrix decoded = decode_numeric(sg.x_num, scales);
  std::vector<DeviceAttributes> out(static_cast<size_t>(m));
  for (int r = 0; r < m; ++r) {
    DeviceAttributes& a = out[static_cast<size_t>(r)];
    a.length = decoded.at(r, 0);
    const double raw_amps = decoded.at(r, 1);
    double best = normamps_table[0];
    for (double cand : normamps_table) {
      // strict < keeps the earlier (smaller) entry on distance ties
      if (std::fabs(cand - raw_amps) < std::fabs(best - raw_amps)) best = cand;
    }
    a.norm_amps = best;
    a.phase = phase_from_index(argmax_row(sg.x_cat_phase, r));
    a.level = argmax_row(sg.x_cat_level, r);
  }
  return out;
}

std::vector<Phase> assign_phases_guided(const FeederGraph& topology, const Matrix& phase_scores) {
  const int m = topology.size();
  if (phase_scores.rows() != m || phase_scores.cols() != kPhaseCount) {
    throw std::invalid_argument("assign_phases_guided: scores must be node-count x " +
                                std::to_string(kPhaseCount));
  }
  std::vector<Phase> phases(static_cast<size_t>(m), Phase::ABC);
  std::deque<int> q{topology.head()};
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    const Phase parent_phase = phases[static_cast<size_t>(u)];
    const bool bifurcates = topology.out_degree(u) >= 2;
    for (int v : topology.children(u)) {
      if (!bifurcates) {
        phases[static_cast<size_t>(v)] = parent_phase;
      } else {
        int best = -1;
        for (int p = 0; p < kPhaseCount; ++p) {
          if (!phase_is_subset(phase_from_index(p), parent_phase)) continue;
          if (best < 0 || phase_scores.at(v, p) > phase_scores.at(v, best)) best = p;
        }
        // the parent's own phase is always admissible, so best >= 0
        phases[static_cast<size_t>(v)] = phase_from_index(best);
      }
      q.push_back(v);
    }
  }
  return phases;
}

FeederGraph realize_feeder(const CandidateTopology& c, int m,
                           const std::vector<DeviceAttributes>& attrs,
                           const std::vector<Phase>& phases, int level_cap) {
  if (static_cast<int>(attrs.size()) != m || static_cast<int>(phases.size()) != m) {
    throw std::invalid_argument("realize_feeder: attribute count disagrees with node count");
  }
  std::vector<DeviceNode> nodes(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    DeviceNode& n = nodes[static_cast<size_t>(i)];
    n.id = i;
    n.length = attrs[static_cast<size_t>(i)].length;
    n.norm_amps = attrs[static_cast<size_t>(i)].norm_amps;
    n.phase = phases[static_cast<size_t>(i)];
    n.xfmr_kva = 0.0;
  }
  FeederGraph g(nodes, c.edges, c.head);
  return compute_topological_features(g, level_cap);
}

}  // namespace feedergen
