#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "feedergen/gan.hpp"

namespace feedergen {

// Pipeline settings shared by the subcommands, loadable from a key=value
// config file; individual flags override file entries.
struct PipelineConfig {
  TrainConfig train;
  int target_count = 0;  // dataset size after augmentation; 0 = sources only
  int min_nodes = 100;   // subgraph acceptance threshold
  int stats_bins = 4;    // length-histogram bins for derived statistics
  double tv_threshold = 0.3;
};

// Apply one key=value setting; unknown keys raise an error listing the valid
// ones. Used both by the config-file loader and by flag overrides.
void apply_config_kv(PipelineConfig& cfg, const std::string& key, const std::string& value);
PipelineConfig load_pipeline_config(const std::string& path);
// '#'-prefixed key=value lines echoing every setting, for log headers.
std::string config_echo(const PipelineConfig& cfg);

// Subcommand bodies. Each returns a process exit code, reports progress and
// diagnostics to err, and writes machine-readable artifacts to files.
int cmd_corpus(const std::string& out_dir, int count, int min_m, int max_m, uint64_t seed,
               std::ostream& err);
int cmd_ingest(const std::vector<std::string>& files, const std::string& out_dir, int stats_bins,
               std::ostream& err);
int cmd_stats(const std::vector<std::string>& files, const std::string& out_path, int bins,
              std::ostream& err);
int cmd_sample(const std::string& corpus_dir, const std::string& out_dir, int count, int min_nodes,
               uint64_t seed, std::ostream& err);
int cmd_train(const std::string& data_dir, const std::string& out_dir, const PipelineConfig& cfg,
              const std::string& resume_checkpoint, std::ostream& err);
int cmd_generate(const std::string& checkpoint, const std::string& stats_path,
                 const std::string& out_dir, int count, int m_min, int m_max,
                 const PipelineConfig& cfg, uint64_t seed, std::ostream& err);
int cmd_validate(const std::vector<std::string>& files, const std::string& stats_path,
                 std::ostream& err);
int cmd_baseline(int m, int trials, uint64_t seed, const std::string& checkpoint,
                 const PipelineConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_plot(const std::string& feeder_file, const std::string& out_svg, std::ostream& err);

// Shared helpers (exposed for tests).
std::vector<std::string> list_feeder_files(const std::string& dir);  // sorted *.feeder paths
FeederGraph load_feeder_graph(const std::string& path);  // parse + features

}  // namespace feedergen
