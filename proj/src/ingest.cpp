#include "feedergen/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace feedergen {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, int line, const std::string& key) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw ParseError(line, "malformed numeric value for " + key + ": '" + s + "'");
  return v;
}

}  // namespace

RawFeederModel parse_feeder_file(std::string_view text, std::vector<std::string>* warnings) {
  RawFeederModel model;
  bool have_source = false;
  std::set<std::string> device_names;

  std::istringstream stream{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  int source_line = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    auto hash = raw_line.find('#');
    if (hash != std::string::npos) raw_line.erase(hash);
    auto toks = split_ws(raw_line);
    if (toks.empty()) continue;

    if (toks[0] == "source") {
      if (toks.size() != 2) throw ParseError(line_no, "source statement needs one bus name");
      if (have_source)
        throw ParseError(line_no, "duplicate source statement (first on line " +
                                      std::to_string(source_line) + ")");
      have_source = true;
      source_line = line_no;
      model.source_bus = toks[1];
    } else if (toks[0] == "device") {
      if (toks.size() < 2) throw ParseError(line_no, "device statement needs a name");
      RawDevice d;
      d.name = toks[1];
      d.line = line_no;
      if (!device_names.insert(d.name).second)
        throw ParseError(line_no, "duplicate device name '" + d.name + "'");
      bool saw_from = false, saw_to = false, saw_phase = false, saw_len = false, saw_amps = false;
      for (size_t i = 2; i < toks.size(); ++i) {
        auto eq = toks[i].find('=');
        if (eq == std::string::npos)
          throw ParseError(line_no, "expected key=value, got '" + toks[i] + "'");
        std::string key = toks[i].substr(0, eq);
        std::string val = toks[i].substr(eq + 1);
        if (val.empty()) throw ParseError(line_no, "empty value for " + key);
        if (key == "from") {
          d.from_bus = val;
          saw_from = true;
        } else if (key == "to") {
          d.to_bus = val;
          saw_to = true;
        } else if (key == "phase") {
          auto p = phase_from_name(val);
          if (!p) throw ParseError(line_no, "unknown phase '" + val + "'");
          d.phase = *p;
          saw_phase = true;
        } else if (key == "length_m") {
          d.length_m = parse_double(val, line_no, key);
          if (d.length_m < 0) throw ParseError(line_no, "negative length_m");
          saw_len = true;
        } else if (key == "normamps") {
          d.norm_amps = parse_double(val, line_no, key);
          if (d.norm_amps < 0) throw ParseError(line_no, "negative normamps");
          saw_amps = true;
        } else if (key == "xfmr_kva") {
          d.xfmr_kva = parse_double(val, line_no, key);
          if (d.xfmr_kva < 0) throw ParseError(line_no, "negative xfmr_kva");
        } else {
          if (warnings)
            warnings->push_back("line " + std::to_string(line_no) + ": unknown key '" + key +
                                "' ignored");
        }
      }
      if (!saw_from || !saw_to || !saw_phase || !saw_len || !saw_amps)
        throw ParseError(line_no,
                         "device '" + d.name + "' missing one of from/to/phase/length_m/normamps");
      if (d.from_bus == d.to_bus)
        throw ParseError(line_no, "device '" + d.name + "' connects a bus to itself");
      model.devices.push_back(std::move(d));
    } else {
      throw ParseError(line_no, "unknown statement '" + toks[0] + "'");
    }
  }

  if (!have_source) throw ParseError(line_no, "missing source statement");

  // Buses are declared by the source statement and by each device's to-bus;
  // check every from-bus against that set (devices may appear in any order).
  std::set<std::string> declared{model.source_bus};
  model.buses.push_back(model.source_bus);
  for (const auto& d : model.devices) {
    if (declared.insert(d.to_bus).second) model.buses.push_back(d.to_bus);
  }
  for (const auto& d : model.devices) {
    if (!declared.count(d.from_bus))
      throw ParseError(d.line, "device '" + d.name + "' references undeclared bus '" + d.from_bus +
                                   "'");
  }
  return model;
}

RawFeederModel parse_feeder_path(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open feeder file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_feeder_file(buf.str(), warnings);
}

FeederGraph device_as_node(const RawFeederModel& raw) {
  const int m = static_cast<int>(raw.devices.size());
  if (m == 0) throw std::invalid_argument("device_as_node: model has no devices");

  // Which device feeds each bus. Two devices into one bus is already a
  // non-radial bus network; let the graph validation report it as in-degree.
  std::map<std::string, std::vector<int>> into_bus;   // to_bus -> device ids
  std::map<std::string, std::vector<int>> out_of_bus; // from_bus -> device ids
  for (int i = 0; i < m; ++i) {
    into_bus[raw.devices[i].to_bus].push_back(i);
    out_of_bus[raw.devices[i].from_bus].push_back(i);
  }

  auto at_source = out_of_bus.find(raw.source_bus);
  if (at_source == out_of_bus.end())
    throw std::invalid_argument("device_as_node: no device leaves the source bus");
  if (at_source->second.size() > 1)
    throw std::invalid_argument(
        "device_as_node: " + std::to_string(at_source->second.size()) +
        " devices leave the source bus; a radial feeder has one (assumption 1)");
  const int head = at_source->second.front();

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    auto it = out_of_bus.find(raw.devices[i].to_bus);
    if (it == out_of_bus.end()) continue;
    for (int j : it->second) edges.emplace_back(i, j);
  }

  std::vector<DeviceNode> nodes(m);
  for (int i = 0; i < m; ++i) {
    nodes[i].length = raw.devices[i].length_m;
    nodes[i].norm_amps = raw.devices[i].norm_amps;
    nodes[i].xfmr_kva = raw.devices[i].xfmr_kva;
    nodes[i].phase = raw.devices[i].phase;
  }

  FeederGraph g(std::move(nodes), edges, head);
  auto violations = validate_radial(g);
  if (!violations.empty()) {
    std::string msg = "device_as_node: bus network is not radial (assumption 1):";
    for (const auto& v : violations) msg += " [" + v.detail + "]";
    throw std::invalid_argument(msg);
  }
  return g;
}

FeederGraph compute_topological_features(const FeederGraph& g, int level_cap) {
  std::vector<DeviceNode> nodes = g.nodes();
  const int m = g.size();

  // Breadth-first order from the head; radial structure assumed.
  std::vector<int> order;
  order.reserve(m);
  order.push_back(g.head());
  for (size_t i = 0; i < order.size(); ++i)
    for (int c : g.children(order[i])) order.push_back(c);
  if (static_cast<int>(order.size()) != m)
    throw std::invalid_argument("compute_topological_features: graph is not connected from head");

  for (int v : order) {
    const int p = g.parent(v);
    if (v == g.head()) {
      nodes[v].distance = nodes[v].length;
      nodes[v].level = 0;
      continue;
    }
    nodes[v].distance = nodes[p].distance + nodes[v].length;
    int level = nodes[p].level;
    const bool bifurcation = g.out_degree(p) >= 2;
    const bool attrs_differ =
        nodes[v].norm_amps != nodes[p].norm_amps || nodes[v].phase != nodes[p].phase;
    if (bifurcation && attrs_differ) level = std::min(level + 1, level_cap);
    nodes[v].level = level;
  }

  // Accumulate transformer capacity bottom-up (children before parents).
  for (int i = m - 1; i >= 0; --i) {
    int v = order[i];
    double load = nodes[v].xfmr_kva;
    for (int c : g.children(v)) load += nodes[c].pseudo_load;
    nodes[v].pseudo_load = load;
  }

  return g.with_nodes(std::move(nodes));
}

Matrix normalize_adjacency(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("normalize_adjacency: matrix not square");
  const int m = a.rows();
  Matrix out(m, m);
  for (int i = 0; i < m; ++i) {
    double deg = 1.0;  // self-loop
    for (int j = 0; j < m; ++j) deg += a.at(i, j);
    for (int j = 0; j < m; ++j) {
      double v = a.at(i, j) + (i == j ? 1.0 : 0.0);
      out.at(i, j) = v / deg;
    }
  }
  return out;
}

Matrix adjacency_of(const FeederGraph& g) {
  Matrix a(g.size(), g.size());
  for (auto [u, v] : g.edges()) a.at(u, v) = 1.0;
  return a;
}

const FeatureRange& FeatureScales::range(int feature) const {
  switch (feature) {
    case 0: return length;
    case 1: return norm_amps;
    case 2: return distance;
    case 3: return pseudo_load;
  }
  throw std::out_of_range("FeatureScales::range: bad feature index");
}

FeatureRange& FeatureScales::range(int feature) {
  return const_cast<FeatureRange&>(static_cast<const FeatureScales*>(this)->range(feature));
}

const char* FeatureScales::feature_name(int feature) {
  switch (feature) {
    case 0: return "length";
    case 1: return "norm_amps";
    case 2: return "distance";
    case 3: return "pseudo_load";
  }
  return "?";
}

FeatureScales FeatureScales::from_corpus(const std::vector<FeederGraph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("FeatureScales::from_corpus: empty corpus");
  FeatureScales s;
  // All four features are physically nonnegative, so the lower bound is
  // pinned at 0: downstream subgraphs shrink distance and pseudo_load toward
  // zero and must still encode with the corpus scales.
  for (int f = 0; f < kFeatureCount; ++f) s.range(f) = {0.0, 0.0};
  auto feed = [&](int f, double v) {
    auto& r = s.range(f);
    r.hi = std::max(r.hi, v);
  };
  for (const auto& g : graphs) {
    for (const auto& n : g.nodes()) {
      feed(0, n.length);
      feed(1, n.norm_amps);
      feed(2, n.distance);
      feed(3, n.pseudo_load);
    }
  }
  return s;
}

double encode_feature(double value, const FeatureRange& r) {
  if (r.hi <= r.lo) return 0.0;  // collapsed range: single observed value
  return 2.0 * (value - r.lo) / (r.hi - r.lo) - 1.0;
}

double decode_feature(double score, const FeatureRange& r) {
  if (r.hi <= r.lo) return r.lo;
  return r.lo + (score + 1.0) * 0.5 * (r.hi - r.lo);
}

GraphTensors encode_attributes(const FeederGraph& g, const FeatureScales& scales) {
  const int m = g.size();
  GraphTensors t;
  t.a_norm = normalize_adjacency(adjacency_of(g));
  t.x_num = Matrix(m, FeatureScales::kFeatureCount);
  t.x_cat_level = Matrix(m, kLevelOneHot);
  t.x_cat_phase = Matrix(m, kPhaseCount);
  t.head_index = g.head();
  for (int v = 0; v < m; ++v) {
    const DeviceNode& n = g.node(v);
    const double raw[FeatureScales::kFeatureCount] = {n.length, n.norm_amps, n.distance,
                                                      n.pseudo_load};
    for (int f = 0; f < FeatureScales::kFeatureCount; ++f) {
      const auto& r = scales.range(f);
      if (raw[f] < r.lo || raw[f] > r.hi)
        throw std::invalid_argument(std::string("encode_attributes: feature ") +
                                    FeatureScales::feature_name(f) + " of node " +
                                    std::to_string(v) + " outside declared range");
      t.x_num.at(v, f) = encode_feature(raw[f], r);
    }
    if (n.level < 0 || n.level > kLevelCap)
      throw std::invalid_argument("encode_attributes: node level outside one-hot range");
    t.x_cat_level.at(v, n.level) = 1.0;
    t.x_cat_phase.at(v, static_cast<int>(n.phase)) = 1.0;
  }
  return t;
}

}  // namespace feedergen
