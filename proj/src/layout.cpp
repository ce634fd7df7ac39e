#include "feedergen/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>

#include "feedergen/reconstruct.hpp"

namespace feedergen {

namespace {

const double kPi = std::acos(-1.0);

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_px(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* phase_color(Phase p) {
  switch (p) {
    case Phase::A: return "#d62728";
    case Phase::B: return "#2ca02c";
    case Phase::C: return "#1f77b4";
    case Phase::AB: return "#bcbd22";
    case Phase::AC: return "#e377c2";
    case Phase::BC: return "#17becf";
    case Phase::ABC: return "#333333";
  }
  return "#000000";
}

}  // namespace

std::vector<double> branch_angle_offsets(int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  for (int k = 1; static_cast<int>(out.size()) < count; ++k) {
    const double base = kPi / std::pow(2.0, k);
    for (int sign = 0; sign < 2 && static_cast<int>(out.size()) < count; ++sign) {
      for (int odd = 1; odd < (1 << k) && static_cast<int>(out.size()) < count; odd += 2) {
        out.push_back((sign == 0 ? 1.0 : -1.0) * odd * base);
      }
    }
  }
  return out;
}

LayoutResult compute_pseudo_coordinates(const FeederGraph& g) {
  const int m = g.size();
  LayoutResult res;
  res.bus_xy.assign(static_cast<size_t>(m), {0.0, 0.0});
  res.angle.assign(static_cast<size_t>(m), 0.0);

  // Subtree device counts (node included) for the ranking rule.
  std::vector<int> subtree(static_cast<size_t>(m), 0);
  {
    std::vector<int> order{g.head()};
    order.reserve(static_cast<size_t>(m));
    for (size_t i = 0; i < order.size(); ++i) {
      for (int c : g.children(order[static_cast<size_t>(i)])) order.push_back(c);
    }
    if (static_cast<int>(order.size()) != m) {
      throw std::invalid_argument("compute_pseudo_coordinates: graph is not connected from head");
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      subtree[static_cast<size_t>(*it)] = 1;
      for (int c : g.children(*it)) subtree[static_cast<size_t>(*it)] += subtree[static_cast<size_t>(c)];
    }
  }

  const int head = g.head();
  res.angle[static_cast<size_t>(head)] = 0.0;
  res.bus_xy[static_cast<size_t>(head)] = {g.node(head).length, 0.0};

  std::deque<int> q{head};
  while (!q.empty()) {
    const int j = q.front();
    q.pop_front();
    std::vector<int> kids = g.children(j);
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      if (subtree[static_cast<size_t>(a)] != subtree[static_cast<size_t>(b)]) {
        return subtree[static_cast<size_t>(a)] > subtree[static_cast<size_t>(b)];
      }
      return a < b;
    });
    const std::vector<double> offsets =
        branch_angle_offsets(std::max(0, static_cast<int>(kids.size()) - 1));
    for (size_t r = 0; r < kids.size(); ++r) {
      const int k = kids[r];
      const double delta = r == 0 ? 0.0 : offsets[r - 1];
      const double theta = res.angle[static_cast<size_t>(j)] + delta;
      res.angle[static_cast<size_t>(k)] = theta;
      const auto& pj = res.bus_xy[static_cast<size_t>(j)];
      const double l = g.node(k).length;
      res.bus_xy[static_cast<size_t>(k)] = {pj.first + l * std::cos(theta),
                                            pj.second + l * std::sin(theta)};
      q.push_back(k);
    }
  }
  return res;
}

std::string emit_svg(const FeederGraph& g, const LayoutResult& layout) {
  const int m = g.size();
  if (static_cast<int>(layout.bus_xy.size()) != m) {
    throw std::invalid_argument("emit_svg: layout does not cover all buses");
  }

  const double scale = 0.5;  // px per meter
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const auto& [x, y] : layout.bus_xy) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  const double margin = 20.0;
  const double w = (max_x - min_x) * scale + 2 * margin;
  const double h = (max_y - min_y) * scale + 2 * margin;
  auto px = [&](double x) { return (x - min_x) * scale + margin; };
  auto py = [&](double y) { return (y - min_y) * scale + margin; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_px(w) + "\" height=\"" +
         fmt_px(h) + "\" viewBox=\"0 0 " + fmt_px(w) + " " + fmt_px(h) + "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const DeviceNode& n : g.nodes()) {
    const auto& to = layout.bus_xy[static_cast<size_t>(n.id)];
    const auto from =
        n.id == g.head() ? layout.source_xy : layout.bus_xy[static_cast<size_t>(g.parent(n.id))];
    svg += "  <line class=\"device phase-" + std::string(phase_name(n.phase)) + "\" x1=\"" +
           fmt_px(px(from.first)) + "\" y1=\"" + fmt_px(py(from.second)) + "\" x2=\"" +
           fmt_px(px(to.first)) + "\" y2=\"" + fmt_px(py(to.second)) + "\" stroke=\"" +
           phase_color(n.phase) + "\" stroke-width=\"" +
           std::to_string(phase_wire_count(n.phase)) + "\"/>\n";
  }
  svg += "  <circle class=\"source\" cx=\"" + fmt_px(px(layout.source_xy.first)) + "\" cy=\"" +
         fmt_px(py(layout.source_xy.second)) + "\" r=\"5\" fill=\"black\"/>\n";
  svg += "</svg>\n";
  return svg;
}

std::string serialize_feeder_model(const RawFeederModel& model) {
  std::string out = "source " + model.source_bus + "\n";
  for (const RawDevice& d : model.devices) {
    if (!std::isfinite(d.length_m) || d.length_m < 0 || !std::isfinite(d.norm_amps) ||
        d.norm_amps < 0 || !std::isfinite(d.xfmr_kva) || d.xfmr_kva < 0) {
      throw std::invalid_argument("serialize_feeder_model: device '" + d.name +
                                  "' has incomplete attributes (length_m/normamps/xfmr_kva)");
    }
    out += "device " + d.name + " from=" + d.from_bus + " to=" + d.to_bus +
           " phase=" + phase_name(d.phase) + " length_m=" + fmt_double(d.length_m) +
           " normamps=" + fmt_double(d.norm_amps);
    if (d.xfmr_kva > 0.0) out += " xfmr_kva=" + fmt_double(d.xfmr_kva);
    out += "\n";
  }
  return out;
}

std::string export_feeder_model(const FeederGraph& g) {
  return serialize_feeder_model(node_to_edge(g));
}

}  // namespace feedergen
