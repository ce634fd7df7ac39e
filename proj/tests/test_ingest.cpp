#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "feedergen/graph.hpp"
#include "feedergen/ingest.hpp"
#include "feedergen/reconstruct.hpp"
#include "feedergen/rng.hpp"

using feedergen::FeederGraph;
using feedergen::FeatureScales;
using feedergen::GraphTensors;
using feedergen::Matrix;
using feedergen::ParseError;
using feedergen::Phase;
using feedergen::RawFeederModel;
using feedergen::Rng;

TEST_CASE("a two-statement file parses into one device") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=100 normamps=400\n");
  CHECK(m.source_bus == "sub");
  REQUIRE(m.devices.size() == 1);
  CHECK(m.devices[0].name == "L1");
  CHECK(m.devices[0].from_bus == "sub");
  CHECK(m.devices[0].to_bus == "b1");
  CHECK(m.devices[0].phase == Phase::ABC);
  CHECK(m.devices[0].length_m == 100.0);
  CHECK(m.devices[0].norm_amps == 400.0);
  CHECK(m.devices[0].xfmr_kva == 0.0);
}

TEST_CASE("an undeclared from-bus is rejected with its line number") {
  try {
    feedergen::parse_feeder_file(
        "source sub\n"
        "device L1 from=bX to=b1 phase=a length_m=10 normamps=100\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("bX") != std::string::npos);
  }
}

TEST_CASE("parse rejections name the offense") {
  CHECK_THROWS_AS((void)feedergen::parse_feeder_file("device L1 from=a to=b phase=a length_m=1 normamps=1\n"),
                  ParseError);  // no source
  CHECK_THROWS_AS((void)feedergen::parse_feeder_file("source s\nsource t\n"), ParseError);
  CHECK_THROWS_AS(
      (void)feedergen::parse_feeder_file(
          "source s\ndevice L from=s to=b phase=a length_m=xyz normamps=1\n"),
      ParseError);
  CHECK_THROWS_AS(
      (void)feedergen::parse_feeder_file(
          "source s\ndevice L from=s to=b phase=q length_m=1 normamps=1\n"),
      ParseError);
  CHECK_THROWS_AS(
      (void)feedergen::parse_feeder_file(
          "source s\n"
          "device L from=s to=b phase=a length_m=1 normamps=1\n"
          "device L from=b to=c phase=a length_m=1 normamps=1\n"),
      ParseError);
}

TEST_CASE("unknown keys are skipped with one warning each") {
  std::vector<std::string> warnings;
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "# comment line\n"
      "device L1 from=sub to=b1 phase=b length_m=5 normamps=100 color=red\n",
      &warnings);
  CHECK(m.devices.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("color") != std::string::npos);
}

TEST_CASE("a five-device file parses into the hand-checked structure") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device T1 from=sub to=b1 phase=abc length_m=120 normamps=600\n"
      "device T2 from=b1 to=b2 phase=abc length_m=80 normamps=400\n"
      "device L1 from=b2 to=b3 phase=a length_m=60 normamps=200 xfmr_kva=25\n"
      "device L2 from=b2 to=b4 phase=b length_m=50 normamps=200\n"
      "device L3 from=b4 to=b5 phase=b length_m=40 normamps=150 xfmr_kva=37.5\n");
  REQUIRE(m.devices.size() == 5);
  CHECK(m.devices[2].xfmr_kva == 25.0);
  CHECK(m.devices[4].length_m == 40.0);

  const FeederGraph g = feedergen::device_as_node(m);
  CHECK(g.size() == 5);
  CHECK(g.head() == 0);
  const std::vector<std::pair<int, int>> want{{0, 1}, {1, 2}, {1, 3}, {3, 4}};
  CHECK(g.edges() == want);
  CHECK(g.node(0).phase == Phase::ABC);
  CHECK(g.node(2).xfmr_kva == 25.0);
}

TEST_CASE("device graph edges follow shared buses") {
  // sub--b1, then b1 branches to b2 and b3.
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=10 normamps=400\n"
      "device L2 from=b1 to=b2 phase=a length_m=10 normamps=200\n"
      "device L3 from=b1 to=b3 phase=b length_m=10 normamps=200\n");
  const FeederGraph g = feedergen::device_as_node(m);
  const std::vector<std::pair<int, int>> want{{0, 1}, {0, 2}};
  CHECK(g.edges() == want);
}

TEST_CASE("a bus loop is rejected as non-radial") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=10 normamps=400\n"
      "device L2 from=b1 to=b2 phase=abc length_m=10 normamps=400\n"
      "device L3 from=b2 to=b1 phase=abc length_m=10 normamps=400\n");
  CHECK_THROWS_AS((void)feedergen::device_as_node(m), std::invalid_argument);
}

TEST_CASE("two devices leaving the source are rejected") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=10 normamps=400\n"
      "device L2 from=sub to=b2 phase=abc length_m=10 normamps=400\n");
  CHECK_THROWS_AS((void)feedergen::device_as_node(m), std::invalid_argument);
}

TEST_CASE("distances accumulate lengths down the chain") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=100 normamps=400\n"
      "device L2 from=b1 to=b2 phase=abc length_m=50 normamps=400\n");
  const FeederGraph g = feedergen::compute_topological_features(feedergen::device_as_node(m));
  CHECK(g.node(0).distance == doctest::Approx(100.0));
  CHECK(g.node(1).distance == doctest::Approx(150.0));
}

TEST_CASE("levels increment at bifurcation children whose attributes change") {
  // Head bifurcates into a single-phase child and a like-for-like child.
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device H from=sub to=b1 phase=abc length_m=10 normamps=400\n"
      "device A from=b1 to=b2 phase=a length_m=10 normamps=400\n"
      "device B from=b1 to=b3 phase=abc length_m=10 normamps=400\n");
  const FeederGraph g = feedergen::compute_topological_features(feedergen::device_as_node(m));
  CHECK(g.node(0).level == 0);
  CHECK(g.node(1).level == 1);  // phase changed at a bifurcation
  CHECK(g.node(2).level == 0);  // same phase, same rating

  // A chain child never increments, even with different attributes.
  const RawFeederModel chain = feedergen::parse_feeder_file(
      "source sub\n"
      "device H from=sub to=b1 phase=abc length_m=10 normamps=400\n"
      "device D from=b1 to=b2 phase=a length_m=10 normamps=100\n");
  const FeederGraph cg =
      feedergen::compute_topological_features(feedergen::device_as_node(chain));
  CHECK(cg.node(1).level == 0);
}

TEST_CASE("pseudo load sums own and downstream transformer capacity") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=10 normamps=400\n"
      "device L2 from=b1 to=b2 phase=abc length_m=10 normamps=400\n"
      "device L3 from=b2 to=b3 phase=abc length_m=10 normamps=400 xfmr_kva=25\n");
  const FeederGraph g = feedergen::compute_topological_features(feedergen::device_as_node(m));
  CHECK(g.node(0).pseudo_load == doctest::Approx(25.0));
  CHECK(g.node(1).pseudo_load == doctest::Approx(25.0));
  CHECK(g.node(2).pseudo_load == doctest::Approx(25.0));
}

TEST_CASE("adjacency normalization divides by one plus out-degree") {
  const Matrix lone = feedergen::normalize_adjacency(Matrix(1, 1, {0.0}));
  CHECK(lone.at(0, 0) == doctest::Approx(1.0));

  const Matrix pair = feedergen::normalize_adjacency(Matrix(2, 2, {0.0, 1.0, 0.0, 0.0}));
  CHECK(pair.at(0, 0) == doctest::Approx(0.5));
  CHECK(pair.at(0, 1) == doctest::Approx(0.5));
  CHECK(pair.at(1, 0) == doctest::Approx(0.0));
  CHECK(pair.at(1, 1) == doctest::Approx(1.0));

  CHECK_THROWS_AS((void)feedergen::normalize_adjacency(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("normalized rows sum to one for random radial adjacencies") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(19));
    Matrix a(m, m);
    for (int child = 1; child < m; ++child) {
      a.at(static_cast<int>(rng.below(static_cast<uint64_t>(child))), child) = 1.0;
    }
    const Matrix n = feedergen::normalize_adjacency(a);
    for (int r = 0; r < m; ++r) {
      double s = 0.0;
      for (int c = 0; c < m; ++c) s += n.at(r, c);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("feature encoding maps ranges onto [-1, 1]") {
  feedergen::FeatureRange r{0.0, 800.0};
  CHECK(feedergen::encode_feature(400.0, r) == doctest::Approx(0.0));
  CHECK(feedergen::encode_feature(800.0, r) == doctest::Approx(1.0));
  CHECK(feedergen::encode_feature(0.0, r) == doctest::Approx(-1.0));
  CHECK(feedergen::decode_feature(0.0, r) == doctest::Approx(400.0));
  CHECK(feedergen::decode_feature(1.0, r) == doctest::Approx(800.0));
  CHECK(feedergen::decode_feature(-1.0, r) == doctest::Approx(0.0));

  const feedergen::FeatureRange collapsed{5.0, 5.0};
  CHECK(feedergen::encode_feature(5.0, collapsed) == 0.0);
  CHECK(feedergen::decode_feature(0.7, collapsed) == 5.0);
}

TEST_CASE("tensor encoding produces one-hot rows and bounded numericals") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=ab length_m=400 normamps=400\n"
      "device L2 from=b1 to=b2 phase=a length_m=800 normamps=200 xfmr_kva=50\n");
  const FeederGraph g = feedergen::compute_topological_features(feedergen::device_as_node(m));
  FeatureScales scales;
  const GraphTensors t = feedergen::encode_attributes(g, scales);

  CHECK(t.head_index == 0);
  CHECK(t.x_num.rows() == 2);
  CHECK(t.x_num.at(0, 0) == doctest::Approx(0.0));  // 400 m at the midpoint of [0, 800]
  CHECK(t.x_num.at(1, 0) == doctest::Approx(1.0));  // 800 m at the top
  for (size_t i = 0; i < t.x_num.size(); ++i) {
    CHECK(t.x_num.data()[i] >= -1.0);
    CHECK(t.x_num.data()[i] <= 1.0);
  }

  // Phase one-hot: the ab slot and nothing else.
  int hot = -1;
  double rowsum = 0.0;
  for (int c = 0; c < t.x_cat_phase.cols(); ++c) {
    rowsum += t.x_cat_phase.at(0, c);
    if (t.x_cat_phase.at(0, c) == 1.0) hot = c;
  }
  CHECK(rowsum == 1.0);
  CHECK(hot == static_cast<int>(Phase::AB));

  // Adjacency rows sum to one.
  for (int r = 0; r < t.a_norm.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < t.a_norm.cols(); ++c) s += t.a_norm.at(r, c);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("out-of-range features are rejected by name") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=a length_m=900 normamps=400\n");
  const FeederGraph g = feedergen::compute_topological_features(feedergen::device_as_node(m));
  FeatureScales scales;  // length tops out at 800
  try {
    (void)feedergen::encode_attributes(g, scales);
    FAIL("expected a rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("length") != std::string::npos);
  }
}

TEST_CASE("encode and decode invert each other on the numeric block") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=123.25 normamps=400\n"
      "device L2 from=b1 to=b2 phase=ab length_m=77.5 normamps=230 xfmr_kva=37.5\n"
      "device L3 from=b1 to=b3 phase=c length_m=689 normamps=100 xfmr_kva=15\n");
  const FeederGraph g = feedergen::compute_topological_features(feedergen::device_as_node(m));
  const FeatureScales scales = FeatureScales::from_corpus({g});
  const GraphTensors t = feedergen::encode_attributes(g, scales);
  const Matrix decoded = feedergen::decode_numeric(t.x_num, scales);
  for (int i = 0; i < g.size(); ++i) {
    CHECK(decoded.at(i, 0) == doctest::Approx(g.node(i).length).epsilon(1e-9));
    CHECK(decoded.at(i, 1) == doctest::Approx(g.node(i).norm_amps).epsilon(1e-9));
    CHECK(decoded.at(i, 2) == doctest::Approx(g.node(i).distance).epsilon(1e-9));
    CHECK(decoded.at(i, 3) == doctest::Approx(g.node(i).pseudo_load).epsilon(1e-9));
  }
}

TEST_CASE("corpus-fitted scales start at zero and cover the maxima") {
  const RawFeederModel m = feedergen::parse_feeder_file(
      "source sub\n"
      "device L1 from=sub to=b1 phase=abc length_m=500 normamps=600\n"
      "device L2 from=b1 to=b2 phase=a length_m=250 normamps=200 xfmr_kva=75\n");
  const FeederGraph g = feedergen::compute_topological_features(feedergen::device_as_node(m));
  const FeatureScales s = FeatureScales::from_corpus({g});
  CHECK(s.length.lo == 0.0);
  CHECK(s.length.hi >= 500.0);
  CHECK(s.norm_amps.hi >= 600.0);
  CHECK(s.distance.hi >= 750.0);
  CHECK(s.pseudo_load.hi >= 75.0);
}
