#pragma once

#include <string>
#include <vector>

#include "feedergen/graph.hpp"
#include "feedergen/rng.hpp"

namespace feedergen {

// One synthetic radial feeder of m devices with realistic structure: exact
// out-degree mix drawn near the reference fractions (no node above degree 4),
// a three-phase trunk thinning to two- and single-phase laterals with
// conductor ratings stepping down at bifurcations, mixed-length conductors,
// and transformers on the leaves. Hierarchy levels stay within the encoding
// cap by construction.
FeederGraph make_synthetic_feeder(int m, Rng& rng);

// Deterministic corpus with node counts uniform in [min_nodes, max_nodes].
std::vector<FeederGraph> make_corpus(int count, int min_nodes, int max_nodes, uint64_t seed);

// One file per feeder ("corpus_000.feeder", ...) in the ingestion grammar.
// Returns the written file names in order.
std::vector<std::string> write_corpus(const std::string& dir,
                                      const std::vector<FeederGraph>& graphs);

}  // namespace feedergen
