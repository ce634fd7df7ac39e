// Command-line driver: one binary, one subcommand per pipeline stage.
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "feedergen/commands.hpp"

namespace {

// Config file first, then each --set key=value override in order.
feedergen::PipelineConfig build_config(const std::string& config_path,
                                       const std::vector<std::string>& sets) {
  feedergen::PipelineConfig cfg;
  if (!config_path.empty()) cfg = feedergen::load_pipeline_config(config_path);
  for (const std::string& kv : sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    feedergen::apply_config_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic radial distribution feeder toolkit: build a reference corpus, train an "
               "adversarial graph model on it, and generate, validate, and draw new feeders."};
  app.require_subcommand(1);

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Write a synthetic reference corpus of feeders");
  std::string corpus_out;
  int corpus_count = 50, corpus_min = 20, corpus_max = 60;
  uint64_t corpus_seed = 1;
  corpus->add_option("--out", corpus_out, "output directory")->required();
  corpus->add_option("--count", corpus_count, "number of feeders (default 50)");
  corpus->add_option("--min-nodes", corpus_min, "smallest feeder size (default 20)");
  corpus->add_option("--max-nodes", corpus_max, "largest feeder size (default 60)");
  corpus->add_option("--seed", corpus_seed, "corpus seed (default 1)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse feeder files into a dataset directory");
  std::vector<std::string> ingest_files;
  std::string ingest_out;
  int ingest_bins = 4;
  ingest->add_option("files", ingest_files, "feeder model files")->required();
  ingest->add_option("--out", ingest_out, "output directory")->required();
  ingest->add_option("--bins", ingest_bins, "length-histogram bins (default 4)");

  // stats
  auto* stats = app.add_subcommand("stats", "Derive a statistics file from feeder files");
  std::vector<std::string> stats_files;
  std::string stats_out;
  int stats_bins = 4;
  stats->add_option("files", stats_files, "feeder model files")->required();
  stats->add_option("--out", stats_out, "output statistics file")->required();
  stats->add_option("--bins", stats_bins, "length-histogram bins (default 4)");

  // sample
  auto* sample = app.add_subcommand("sample", "Materialize a training dataset with subgraph "
                                              "augmentation");
  std::string sample_corpus, sample_out;
  int sample_count = 0, sample_min_nodes = 100;
  uint64_t sample_seed = 0;
  sample->add_option("--corpus", sample_corpus, "corpus directory")->required();
  sample->add_option("--out", sample_out, "output dataset directory")->required();
  sample->add_option("--count", sample_count, "dataset size (0 = sources only)");
  sample->add_option("--min-nodes", sample_min_nodes, "subgraph size floor (default 100)");
  sample->add_option("--seed", sample_seed, "sampling seed")->required();

  // train
  auto* train = app.add_subcommand("train", "Train the adversarial model on a dataset directory");
  std::string train_data, train_out, train_config, train_resume;
  std::vector<std::string> train_sets;
  train->add_option("--data", train_data, "dataset directory of .feeder files")->required();
  train->add_option("--out", train_out, "output directory")->required();
  train->add_option("--config", train_config, "key=value config file");
  train->add_option("--set", train_sets, "config override, key=value (repeatable)");
  train->add_option("--resume", train_resume, "checkpoint to continue from");

  // generate
  auto* generate = app.add_subcommand("generate", "Generate feeders from a trained checkpoint");
  std::string gen_checkpoint, gen_stats, gen_out, gen_config;
  std::vector<std::string> gen_sets;
  int gen_count = 5, gen_m_min = 20, gen_m_max = 60;
  uint64_t gen_seed = 0;
  generate->add_option("--checkpoint", gen_checkpoint, "trained model checkpoint")->required();
  generate->add_option("--stats", gen_stats, "statistics file from the training corpus")
      ->required();
  generate->add_option("--out", gen_out, "output directory")->required();
  generate->add_option("--count", gen_count, "samples to draw (default 5)");
  generate->add_option("--m-min", gen_m_min, "smallest node count (default 20)");
  generate->add_option("--m-max", gen_m_max, "largest node count (default 60)");
  generate->add_option("--seed", gen_seed, "generation seed")->required();
  generate->add_option("--config", gen_config, "key=value config file (architecture must match "
                                               "the checkpoint)");
  generate->add_option("--set", gen_sets, "config override, key=value (repeatable)");

  // validate
  auto* validate = app.add_subcommand("validate", "Check feeder files against a statistics file");
  std::vector<std::string> validate_files;
  std::string validate_stats;
  validate->add_option("files", validate_files, "feeder model files")->required();
  validate->add_option("--stats", validate_stats, "statistics file")->required();

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Compare model rates against the random-matrix "
                                                  "baseline");
  std::string base_checkpoint, base_config;
  std::vector<std::string> base_sets;
  int base_m = 40, base_trials = 500;
  uint64_t base_seed = 1;
  baseline->add_option("--checkpoint", base_checkpoint, "trained model checkpoint")->required();
  baseline->add_option("--m", base_m, "node count per trial (default 40)");
  baseline->add_option("--trials", base_trials, "trials per column (default 500)");
  baseline->add_option("--seed", base_seed, "trial seed (default 1)");
  baseline->add_option("--config", base_config, "key=value config file (architecture must match "
                                                "the checkpoint)");
  baseline->add_option("--set", base_sets, "config override, key=value (repeatable)");

  // plot
  auto* plot = app.add_subcommand("plot", "Draw one feeder file as SVG");
  std::string plot_in, plot_out;
  plot->add_option("file", plot_in, "feeder model file")->required();
  plot->add_option("--out", plot_out, "output SVG file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(corpus)) {
      return feedergen::cmd_corpus(corpus_out, corpus_count, corpus_min, corpus_max, corpus_seed,
                                   std::cerr);
    }
    if (app.got_subcommand(ingest)) {
      return feedergen::cmd_ingest(ingest_files, ingest_out, ingest_bins, std::cerr);
    }
    if (app.got_subcommand(stats)) {
      return feedergen::cmd_stats(stats_files, stats_out, stats_bins, std::cerr);
    }
    if (app.got_subcommand(sample)) {
      return feedergen::cmd_sample(sample_corpus, sample_out, sample_count, sample_min_nodes,
                                   sample_seed, std::cerr);
    }
    if (app.got_subcommand(train)) {
      const feedergen::PipelineConfig cfg = build_config(train_config, train_sets);
      return feedergen::cmd_train(train_data, train_out, cfg, train_resume, std::cerr);
    }
    if (app.got_subcommand(generate)) {
      const feedergen::PipelineConfig cfg = build_config(gen_config, gen_sets);
      return feedergen::cmd_generate(gen_checkpoint, gen_stats, gen_out, gen_count, gen_m_min,
                                     gen_m_max, cfg, gen_seed, std::cerr);
    }
    if (app.got_subcommand(validate)) {
      return feedergen::cmd_validate(validate_files, validate_stats, std::cerr);
    }
    if (app.got_subcommand(baseline)) {
      const feedergen::PipelineConfig cfg = build_config(base_config, base_sets);
      return feedergen::cmd_baseline(base_m, base_trials, base_seed, base_checkpoint, cfg,
                                     std::cout, std::cerr);
    }
    if (app.got_subcommand(plot)) {
      return feedergen::cmd_plot(plot_in, plot_out, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;  // unreachable: require_subcommand(1)
}
