#pragma once

#include <functional>
#include <string>
#include <vector>

#include "feedergen/augment.hpp"
#include "feedergen/nn/checkpoint.hpp"
#include "feedergen/nn/layers.hpp"
#include "feedergen/reconstruct.hpp"

namespace feedergen {

struct TrainConfig {
  // Optimization (adversarial loop defaults).
  double alpha = 0.0001;  // RMSProp learning rate
  double clip = 0.1;      // critic weight clamp [-c, c]
  int n_bootstrap = 20;   // iterations trained with the long critic schedule
  int n0 = 500;           // periodic long-schedule cadence
  int n1 = 1000;          // critic steps on long-schedule iterations
  int n2 = 5;             // critic steps otherwise
  double rms_decay = 0.9;
  double rms_eps = 1e-8;

  // Architecture.
  int noise_width = 20;  // s
  int hidden1 = 128;
  int hidden2 = 64;
  int embed_width = 8;
  int adj_rank = 64;  // k_adj
  double leaky_slope = 0.01;
  double ln_eps = 1e-5;

  // Loop control.
  uint64_t seed = 1;
  int max_iterations = 2000;

  // Monitoring.
  int monitor_every = 50;    // snapshot cadence in generator iterations
  int monitor_window = 500;  // window width for averaged metrics
  int monitor_samples = 2;   // generated graphs per snapshot
  double phase_collapse_threshold = 0.9;
  double topology_collapse_threshold = 0.02;
  bool early_stop = true;
  int early_stop_min = 3000;
  int early_stop_max = 4000;
};

struct GenOut {
  nn::Tape::Id a_soft;
  nn::Tape::Id x_num;
  nn::Tape::Id x_cat_level;
  nn::Tape::Id x_cat_phase;
};

// Noise-to-graph network. One latent trunk feeds a numerical head (tanh),
// two categorical heads (row softmax), and an adjacency head built from the
// normalized concatenation of the heads' pre-activations.
class GeneratorNet {
 public:
  explicit GeneratorNet(const TrainConfig& cfg);
  void init(Rng& rng);
  GenOut forward(nn::Tape& t, nn::Tape::Id z);
  std::vector<nn::Param*> params();

 private:
  nn::FcLayer fc1_;        // noise -> hidden1
  nn::FcLayer fc2_;        // hidden1 -> 4 numerical
  nn::FcLayer fc3_;        // hidden1 -> hidden2
  nn::FcLayer fc4_level_;  // hidden2 -> level categories
  nn::FcLayer fc4_phase_;  // hidden2 -> phase categories
  nn::LayerNormLayer norm_;
  nn::FcLayer fc5_;  // normalized latent -> adjacency factor
};

// Graph critic: embedded categoricals + numericals, normalized, through two
// graph convolutions; per-node scores from the residual concatenation; the
// graph score is the max over nodes. No output squashing.
class DiscriminatorNet {
 public:
  explicit DiscriminatorNet(const TrainConfig& cfg);
  void init(Rng& rng);
  nn::Tape::Id forward(nn::Tape& t, nn::Tape::Id a, nn::Tape::Id x_num, nn::Tape::Id x_cat_level,
                       nn::Tape::Id x_cat_phase);
  std::vector<nn::Param*> params();

 private:
  double leaky_;
  nn::EmbeddingLayer emb_level_;
  nn::EmbeddingLayer emb_phase_;
  nn::LayerNormLayer norm_;
  nn::GcnLayer gcn1_;
  nn::GcnLayer gcn2_;
  nn::FcLayer fc6_;
};

struct GanModel {
  GeneratorNet gen;
  DiscriminatorNet disc;

  explicit GanModel(const TrainConfig& cfg) : gen(cfg), disc(cfg) {}
  void init(Rng& rng);  // generator first, then discriminator
  std::vector<nn::Param*> params();
};

// Evaluate the generator on explicit noise; outputs detached.
SoftGraph generator_forward(GeneratorNet& gen, const Matrix& z);

// Critic score of a detached sample.
double discriminator_score(DiscriminatorNet& disc, const Matrix& a, const Matrix& x_num,
                           const Matrix& x_cat_level, const Matrix& x_cat_phase);
double discriminator_score(DiscriminatorNet& disc, const SoftGraph& sg);
double discriminator_score(DiscriminatorNet& disc, const GraphTensors& t);

inline double wasserstein_distance(double real_score, double fake_score) {
  return real_score - fake_score;
}

// Critic steps for generator iteration i: n1 while bootstrapping (i <
// n_bootstrap) and on every n0-th iteration, n2 otherwise.
int schedule_iterations(int i, const TrainConfig& cfg);

struct TrainLogRow {
  int iter = 0;  // generator iteration, 1-based in logs
  double real_score = 0.0;
  double fake_score = 0.0;
  double w_distance = 0.0;
};

// Windowed monitor metrics with mode-collapse flags.
struct MonitorWindow {
  int first_iter = 0;  // window covers (first_iter, last_iter]
  int last_iter = 0;
  int snapshots = 0;
  double connected_rate = 0.0;
  double success_rate = 0.0;
  double perfect_rate = 0.0;
  double dominant_phase_fraction = 0.0;
  std::string dominant_phase;
  double bifurcation_fraction = 0.0;
  bool phase_collapse = false;
  bool topology_collapse = false;
};

// Aggregates generated snapshots into fixed windows. Phase fractions come
// from row-argmax phases over all generated nodes; bifurcation fraction is
// the share of nodes with out-degree >= 2 in the discretized adjacency.
class Monitor {
 public:
  explicit Monitor(const TrainConfig& cfg);
  void add_snapshot(int iter, const std::vector<SoftGraph>& samples);
  const std::vector<MonitorWindow>& windows() const { return windows_; }
  // Flag state of the most recently completed window, if any.
  bool last_window_collapsed() const;

 private:
  void roll(int iter);  // close windows up to the one containing iter
  void finalize_window(MonitorWindow& w) const;

  TrainConfig cfg_;
  MonitorWindow open_{};
  double node_count_ = 0.0;
  double bifurcation_nodes_ = 0.0;
  std::vector<double> phase_nodes_;
  std::vector<MonitorWindow> windows_;
};

struct TrainHooks {
  // After each critic update (post clip). inner is the step index within the
  // current generator iteration.
  std::function<void(const GanModel&, int iter, int inner)> after_disc_step;
  // After each generator update.
  std::function<void(const GanModel&, int iter)> after_gen_step;
  // After each completed iteration's log row, for streaming writers.
  std::function<void(const TrainLogRow&)> on_log_row;
  // Every monitor_every iterations, the freshly generated snapshot samples.
  std::function<void(int iter, const std::vector<SoftGraph>&)> on_snapshot;
};

struct TrainState {
  GanModel model;
  Rng rng;
  int next_iter = 0;  // generator iterations completed so far

  explicit TrainState(const TrainConfig& cfg);
};

struct TrainResult {
  std::vector<TrainLogRow> log;  // one row per generator iteration of this run
  std::vector<MonitorWindow> monitor;
  int iterations_done = 0;       // total completed (including resumed-from)
  bool halted_divergence = false;
  int early_stopped_at = -1;  // iteration of the early stop, -1 if none
};

// Staged adversarial training. Resumable: continues from state.next_iter up
// to cfg.max_iterations, mutating state in place. Non-finite scores roll the
// model back to the last finite iteration and halt.
TrainResult train(const Dataset& dataset, const TrainConfig& cfg, TrainState& state,
                  const TrainHooks& hooks = {});

// Checkpoint glue: parameters plus iteration counter and draw-stream state.
void save_train_state(const std::string& path, TrainState& state);
void load_train_state(const std::string& path, TrainState& state);

// Serialize the log as tab-separated text (header + one row per iteration).
std::string format_training_log(const std::vector<TrainLogRow>& rows);
std::vector<TrainLogRow> parse_training_log(const std::string& text);

}  // namespace feedergen
