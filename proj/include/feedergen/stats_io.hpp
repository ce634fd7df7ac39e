#pragma once

#include <string>
#include <vector>

#include "feedergen/ingest.hpp"
#include "feedergen/validate.hpp"

namespace feedergen {

// Everything the generation side needs to decode and screen feeders:
// feature scales, plausibility envelope, and the conductor rating table.
struct StatsFile {
  FeatureScales scales;
  EmpiricalStats stats;
  std::vector<double> normamps_table;
};

// key=value text with a [length_histogram] section; '#' starts a comment.
std::string write_stats_text(const StatsFile& s);
StatsFile read_stats_text(const std::string& text);

void write_stats_path(const std::string& path, const StatsFile& s);
StatsFile read_stats_path(const std::string& path);

// Derive the whole stats bundle from parsed corpus feeders.
StatsFile stats_from_corpus(const std::vector<FeederGraph>& graphs, int bins = 8);

}  // namespace feedergen
