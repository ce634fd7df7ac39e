#pragma once

#include <string>
#include <utility>
#include <vector>

#include "feedergen/graph.hpp"
#include "feedergen/ingest.hpp"

namespace feedergen {

// Pseudo-coordinates for drawing: every device is a straight segment from its
// parent's tail bus to its own tail bus.
struct LayoutResult {
  std::pair<double, double> source_xy{0.0, 0.0};
  std::vector<std::pair<double, double>> bus_xy;  // tail bus per device, by node id
  std::vector<double> angle;                      // segment direction per device, radians
};

// Branching angle offsets for the 2nd, 3rd, ... ranked child at a
// bifurcation: pi/2, -pi/2, pi/4, 3pi/4, -pi/4, -3pi/4, then each further
// halving (pi/8, 3pi/8, ..., then the negatives), ad infinitum.
std::vector<double> branch_angle_offsets(int count);

// Greedy angular layout: the source sits at the origin, the head leaves it at
// angle 0, chains continue straight, and at each bifurcation children ranked
// by descending subtree device count (ties by ascending id) take offsets from
// branch_angle_offsets, with the first-ranked child continuing straight.
LayoutResult compute_pseudo_coordinates(const FeederGraph& g);

// Standalone SVG document: one line element per device styled by phase, a
// marker on the source. 1 m = 0.5 px with an auto-fitted viewBox.
std::string emit_svg(const FeederGraph& g, const LayoutResult& layout);

// Serialize a bus model in the ingestion grammar.
std::string serialize_feeder_model(const RawFeederModel& model);

// Feeder file text for a device graph; parsing it back reproduces the graph
// exactly (devices are written in node-id order, so ids survive the trip).
std::string export_feeder_model(const FeederGraph& g);

}  // namespace feedergen
