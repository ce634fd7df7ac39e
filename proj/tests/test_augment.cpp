#include <string>
#include <vector>

#include "doctest.h"
#include "feedergen/augment.hpp"
#include "feedergen/corpus.hpp"
#include "feedergen/graph.hpp"
#include "feedergen/ingest.hpp"
#include "feedergen/rng.hpp"

using feedergen::Dataset;
using feedergen::FeederGraph;
using feedergen::Phase;
using feedergen::Rng;

namespace {

// Plain chain: every node level 0, so any node may be drawn as a start.
FeederGraph chain_feeder(int m) {
  std::vector<feedergen::DeviceNode> nodes(static_cast<size_t>(m));
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    nodes[static_cast<size_t>(i)].id = i;
    nodes[static_cast<size_t>(i)].phase = Phase::ABC;
    nodes[static_cast<size_t>(i)].norm_amps = 400.0;
    nodes[static_cast<size_t>(i)].length = 100.0;
    if (i > 0) edges.emplace_back(i - 1, i);
  }
  return feedergen::compute_topological_features(FeederGraph(nodes, edges, 0));
}

}  // namespace

TEST_CASE("small feeders can never satisfy a large node floor") {
  const FeederGraph g = chain_feeder(10);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    CHECK_FALSE(feedergen::sample_subgraph(g, 100, rng).has_value());
  }
}

TEST_CASE("subtrees above half the feeder are rejected") {
  // Chain of 10: subtree sizes are 10, 9, ..., 1. Asking for at least 6
  // nodes leaves only subtrees that exceed the 50% ceiling, so every draw
  // fails one bound or the other.
  const FeederGraph g = chain_feeder(10);
  Rng rng(2);
  for (int i = 0; i < 40; ++i) {
    CHECK_FALSE(feedergen::sample_subgraph(g, 6, rng).has_value());
  }
}

TEST_CASE("accepted subgraphs sit inside both size bounds") {
  // This source feeder has shallow nodes whose subtrees fall inside the
  // [min_nodes, 50%] window, so a fair share of draws is accepted.
  Rng source_rng(45);
  const FeederGraph g = feedergen::compute_topological_features(
      feedergen::make_synthetic_feeder(60, source_rng));
  Rng rng(3);
  int accepted = 0;
  for (int i = 0; i < 200; ++i) {
    const auto sub = feedergen::sample_subgraph(g, 10, rng);
    if (!sub) continue;
    ++accepted;
    CHECK(sub->size() >= 10);
    CHECK(sub->size() * 2 <= g.size());
    CHECK(feedergen::validate_radial(*sub).empty());
    // Renumbered densely with the new head first in id order terms.
    CHECK(sub->head() >= 0);
    CHECK(sub->head() < sub->size());
    // Features rederived from the new head.
    CHECK(sub->node(sub->head()).distance ==
          doctest::Approx(sub->node(sub->head()).length));
    CHECK(sub->node(sub->head()).level == 0);
  }
  CHECK(accepted > 0);
}

TEST_CASE("a dataset with no augmentation is exactly the sources") {
  const FeederGraph g = chain_feeder(12);
  const Dataset d = feedergen::build_dataset({g}, {"only"}, 1, 5, 7);
  REQUIRE(d.members.size() == 1);
  CHECK(d.members[0].origin == "only");
  CHECK(d.members[0].graph.size() == 12);
}

TEST_CASE("dataset construction is deterministic for a fixed seed") {
  // Sources picked so every one of them has admissible subgraph starts.
  std::vector<FeederGraph> sources;
  std::vector<std::string> names;
  const std::pair<int, uint64_t> shapes[] = {{60, 44}, {60, 45}, {80, 40}};
  for (int i = 0; i < 3; ++i) {
    Rng r(shapes[i].second);
    sources.push_back(feedergen::compute_topological_features(
        feedergen::make_synthetic_feeder(shapes[i].first, r)));
    names.push_back("f" + std::to_string(i));
  }
  const Dataset a = feedergen::build_dataset(sources, names, 8, 10, 99);
  const Dataset b = feedergen::build_dataset(sources, names, 8, 10, 99);
  REQUIRE(a.members.size() == 8);
  REQUIRE(b.members.size() == 8);
  for (size_t i = 0; i < a.members.size(); ++i) {
    CHECK(a.members[i].origin == b.members[i].origin);
    CHECK(a.members[i].graph.size() == b.members[i].graph.size());
    CHECK(a.members[i].tensors.a_norm == b.members[i].tensors.a_norm);
    CHECK(a.members[i].tensors.x_num == b.members[i].tensors.x_num);
    CHECK(a.members[i].tensors.x_cat_level == b.members[i].tensors.x_cat_level);
    CHECK(a.members[i].tensors.x_cat_phase == b.members[i].tensors.x_cat_phase);
  }
}

TEST_CASE("augmented members carry provenance and stay radial") {
  Rng r(44);
  const FeederGraph g =
      feedergen::compute_topological_features(feedergen::make_synthetic_feeder(56, r));
  const Dataset d = feedergen::build_dataset({g}, {"src"}, 5, 10, 13);
  REQUIRE(d.members.size() == 5);
  CHECK(d.members[0].origin == "src");
  for (size_t i = 1; i < d.members.size(); ++i) {
    CHECK(d.members[i].origin.find("src+sub") == 0);
    CHECK(d.members[i].graph.size() >= 10);
    CHECK(d.members[i].graph.size() * 2 <= g.size());
    CHECK(feedergen::validate_radial(d.members[i].graph).empty());
  }
}

TEST_CASE("scales come from the sources, not the subgraphs") {
  Rng r(45);
  const FeederGraph g =
      feedergen::compute_topological_features(feedergen::make_synthetic_feeder(56, r));
  const Dataset d = feedergen::build_dataset({g}, {"src"}, 4, 10, 13);
  const feedergen::FeatureScales direct = feedergen::FeatureScales::from_corpus({g});
  CHECK(d.scales.length.hi == direct.length.hi);
  CHECK(d.scales.distance.hi == direct.distance.hi);
  CHECK(d.scales.pseudo_load.hi == direct.pseudo_load.hi);
}

TEST_CASE("impossible targets are rejected with diagnostics") {
  const FeederGraph g = chain_feeder(10);
  CHECK_THROWS_AS((void)feedergen::build_dataset({g}, {"g"}, 0, 5, 1), std::invalid_argument);
  // min_nodes larger than any admissible subtree: augmentation cannot finish.
  CHECK_THROWS_AS((void)feedergen::build_dataset({g}, {"g"}, 3, 100, 1), std::runtime_error);
}
