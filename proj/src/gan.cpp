#include "feedergen/gan.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "feedergen/validate.hpp"

namespace feedergen {

namespace {

constexpr int kNumWidth = 4;

void require_finite(const nn::Tape& t, nn::Tape::Id id, const char* stage) {
  if (!all_finite(t.value(id))) {
    throw std::runtime_error(std::string("generator_forward: non-finite values after ") + stage);
  }
}

void validate_config(const TrainConfig& cfg) {
  auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("TrainConfig: ") + what);
  };
  if (!(cfg.alpha > 0.0)) fail("alpha must be positive");
  if (!(cfg.clip > 0.0)) fail("clip must be positive");
  if (cfg.n_bootstrap < 0) fail("n_bootstrap must be >= 0");
  if (cfg.n0 < 1) fail("n0 must be >= 1");
  if (cfg.n1 < 1 || cfg.n2 < 1) fail("n1 and n2 must be >= 1");
  if (cfg.noise_width < 1) fail("noise_width must be >= 1");
  if (cfg.hidden1 < 1 || cfg.hidden2 < 1) fail("hidden sizes must be >= 1");
  if (cfg.embed_width < 1) fail("embed_width must be >= 1");
  if (cfg.adj_rank < 1) fail("adj_rank must be >= 1");
  if (cfg.max_iterations < 0) fail("max_iterations must be >= 0");
  if (cfg.monitor_every < 1) fail("monitor_every must be >= 1");
  if (cfg.monitor_window < cfg.monitor_every || cfg.monitor_window % cfg.monitor_every != 0) {
    fail("monitor_window must be a multiple of monitor_every");
  }
  if (cfg.monitor_samples < 1) fail("monitor_samples must be >= 1");
}

Matrix draw_noise(int m, int width, Rng& rng) {
  Matrix z(m, width);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < width; ++c) z.at(r, c) = rng.normal();
  }
  return z;
}

struct Rollback {
  std::vector<Matrix> values;
  std::vector<Matrix> rms;
  std::string rng_state;
  int iter = 0;
};

Rollback snapshot_state(const std::vector<nn::Param*>& params, const Rng& rng, int iter) {
  Rollback r;
  r.values.reserve(params.size());
  r.rms.reserve(params.size());
  for (const nn::Param* p : params) {
    r.values.push_back(p->value);
    r.rms.push_back(p->rms);
  }
  r.rng_state = rng.save_state();
  r.iter = iter;
  return r;
}

void restore_state(const Rollback& r, const std::vector<nn::Param*>& params, Rng& rng) {
  for (size_t k = 0; k < params.size(); ++k) {
    params[k]->value = r.values[k];
    params[k]->rms = r.rms[k];
    params[k]->grad.fill(0.0);
  }
  rng.load_state(r.rng_state);
}

}  // namespace

GeneratorNet::GeneratorNet(const TrainConfig& cfg)
    : fc1_("g.fc1", cfg.noise_width, cfg.hidden1),
      fc2_("g.fc2", cfg.hidden1, kNumWidth),
      fc3_("g.fc3", cfg.hidden1, cfg.hidden2),
      fc4_level_("g.fc4_level", cfg.hidden2, kLevelOneHot),
      fc4_phase_("g.fc4_phase", cfg.hidden2, kPhaseCount),
      norm_("g.norm", kNumWidth + kLevelOneHot + kPhaseCount, cfg.ln_eps),
      fc5_("g.fc5", kNumWidth + kLevelOneHot + kPhaseCount, cfg.adj_rank) {}

void GeneratorNet::init(Rng& rng) {
  fc1_.init(rng);
  fc2_.init(rng);
  fc3_.init(rng);
  fc4_level_.init(rng);
  fc4_phase_.init(rng);
  norm_.init(rng);
  fc5_.init(rng);
}

GenOut GeneratorNet::forward(nn::Tape& t, nn::Tape::Id z) {
  const auto l = t.relu(fc1_.forward(t, z));
  require_finite(t, l, "fc1");
  const auto num_pre = fc2_.forward(t, l);
  require_finite(t, num_pre, "fc2");
  const auto v = t.relu(fc3_.forward(t, l));
  require_finite(t, v, "fc3");
  const auto level_pre = fc4_level_.forward(t, v);
  require_finite(t, level_pre, "fc4_level");
  const auto phase_pre = fc4_phase_.forward(t, v);
  require_finite(t, phase_pre, "fc4_phase");

  GenOut out;
  out.x_num = t.tanh_(num_pre);
  out.x_cat_level = t.softmax_rows(level_pre);
  out.x_cat_phase = t.softmax_rows(phase_pre);

  const auto latent = norm_.forward(t, t.concat_cols({num_pre, level_pre, phase_pre}));
  const auto factor = fc5_.forward(t, latent);
  require_finite(t, factor, "fc5");
  out.a_soft = t.softmax_cols(t.matmul_nt(factor, factor));
  require_finite(t, out.a_soft, "adjacency softmax");
  return out;
}

std::vector<nn::Param*> GeneratorNet::params() {
  std::vector<nn::Param*> out;
  for (auto* layer : {&fc1_, &fc2_, &fc3_, &fc4_level_, &fc4_phase_}) {
    for (auto* p : layer->params()) out.push_back(p);
  }
  for (auto* p : norm_.params()) out.push_back(p);
  for (auto* p : fc5_.params()) out.push_back(p);
  return out;
}

DiscriminatorNet::DiscriminatorNet(const TrainConfig& cfg)
    : leaky_(cfg.leaky_slope),
      emb_level_("d.emb_level", kLevelOneHot, cfg.embed_width),
      emb_phase_("d.emb_phase", kPhaseCount, cfg.embed_width),
      norm_("d.norm", 2 * cfg.embed_width + kNumWidth, cfg.ln_eps),
      gcn1_("d.gcn1", 2 * cfg.embed_width + kNumWidth, cfg.hidden1),
      gcn2_("d.gcn2", cfg.hidden1, cfg.hidden2),
      fc6_("d.fc6", 2 * cfg.embed_width + kNumWidth + cfg.hidden1 + cfg.hidden2, 1) {}

void DiscriminatorNet::init(Rng& rng) {
  emb_level_.init(rng);
  emb_phase_.init(rng);
  norm_.init(rng);
  gcn1_.init(rng);
  gcn2_.init(rng);
  fc6_.init(rng);
}

nn::Tape::Id DiscriminatorNet::forward(nn::Tape& t, nn::Tape::Id a, nn::Tape::Id x_num,
                                       nn::Tape::Id x_cat_level, nn::Tape::Id x_cat_phase) {
  const auto p1 = emb_level_.forward(t, x_cat_level);
  const auto p2 = emb_phase_.forward(t, x_cat_phase);
  const auto r = norm_.forward(t, t.concat_cols({p1, p2, x_num}));
  const auto h = t.leaky_relu(gcn1_.forward(t, a, r), leaky_);
  const auto i = t.leaky_relu(gcn2_.forward(t, a, h), leaky_);
  const auto o = fc6_.forward(t, t.concat_cols({r, h, i}));
  return t.max_all(o);
}

std::vector<nn::Param*> DiscriminatorNet::params() {
  std::vector<nn::Param*> out;
  for (auto* p : emb_level_.params()) out.push_back(p);
  for (auto* p : emb_phase_.params()) out.push_back(p);
  for (auto* p : norm_.params()) out.push_back(p);
  for (auto* p : gcn1_.params()) out.push_back(p);
  for (auto* p : gcn2_.params()) out.push_back(p);
  for (auto* p : fc6_.params()) out.push_back(p);
  return out;
}

void GanModel::init(Rng& rng) {
  gen.init(rng);
  disc.init(rng);
}

std::vector<nn::Param*> GanModel::params() {
  std::vector<nn::Param*> out = gen.params();
  for (auto* p : disc.params()) out.push_back(p);
  return out;
}

SoftGraph generator_forward(GeneratorNet& gen, const Matrix& z) {
  nn::Tape t;
  const GenOut out = gen.forward(t, t.input(z));
  SoftGraph sg;
  sg.a_soft = t.value(out.a_soft);
  sg.x_num = t.value(out.x_num);
  sg.x_cat_level = t.value(out.x_cat_level);
  sg.x_cat_phase = t.value(out.x_cat_phase);
  return sg;
}

double discriminator_score(DiscriminatorNet& disc, const Matrix& a, const Matrix& x_num,
                           const Matrix& x_cat_level, const Matrix& x_cat_phase) {
  nn::Tape t;
  const auto score = disc.forward(t, t.input(a), t.input(x_num), t.input(x_cat_level),
                                  t.input(x_cat_phase));
  return t.value(score).at(0, 0);
}

double discriminator_score(DiscriminatorNet& disc, const SoftGraph& sg) {
  return discriminator_score(disc, sg.a_soft, sg.x_num, sg.x_cat_level, sg.x_cat_phase);
}

double discriminator_score(DiscriminatorNet& disc, const GraphTensors& t) {
  return discriminator_score(disc, t.a_norm, t.x_num, t.x_cat_level, t.x_cat_phase);
}

int schedule_iterations(int i, const TrainConfig& cfg) {
  if (i < 0) throw std::invalid_argument("schedule_iterations: negative iteration");
  return (i < cfg.n_bootstrap || i % cfg.n0 == 0) ? cfg.n1 : cfg.n2;
}

TrainState::TrainState(const TrainConfig& cfg) : model(cfg), rng(cfg.seed) {
  model.init(rng);
}

Monitor::Monitor(const TrainConfig& cfg) : cfg_(cfg), phase_nodes_(kPhaseCount, 0.0) {
  open_.first_iter = 0;
  open_.last_iter = cfg_.monitor_window;
}

bool Monitor::last_window_collapsed() const {
  if (windows_.empty()) return false;
  return windows_.back().phase_collapse || windows_.back().topology_collapse;
}

void Monitor::roll(int iter) {
  if (iter <= open_.last_iter) return;
  if (open_.snapshots > 0) {
    MonitorWindow w = open_;
    finalize_window(w);
    windows_.push_back(w);
  }
  const int width = cfg_.monitor_window;
  open_ = MonitorWindow{};
  open_.first_iter = ((iter - 1) / width) * width;
  open_.last_iter = open_.first_iter + width;
  node_count_ = 0.0;
  bifurcation_nodes_ = 0.0;
  phase_nodes_.assign(kPhaseCount, 0.0);
}

void Monitor::add_snapshot(int iter, const std::vector<SoftGraph>& samples) {
  roll(iter);
  const FeatureScales scales;  // snapping table scales; rates only need phases
  double conn = 0.0, succ = 0.0, perf = 0.0;
  for (const SoftGraph& sg : samples) {
    const int m = sg.a_soft.rows();
    const Matrix a_bin = reconstruct_adjacency(sg.a_soft);
    for (int r = 0; r < m; ++r) {
      int deg = 0;
      for (int c = 0; c < m; ++c) {
        if (a_bin.at(r, c) != 0.0) ++deg;
      }
      if (deg >= 2) bifurcation_nodes_ += 1.0;
      int best = 0;
      for (int c = 1; c < kPhaseCount; ++c) {
        if (sg.x_cat_phase.at(r, c) > sg.x_cat_phase.at(r, best)) best = c;
      }
      phase_nodes_[static_cast<size_t>(best)] += 1.0;
      node_count_ += 1.0;
    }
    const RateSet rates = pipeline_rates(sg, scales);
    conn += rates.connected;
    succ += rates.success;
    perf += rates.perfect;
  }
  const double inv = samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size());
  open_.connected_rate += conn * inv;
  open_.success_rate += succ * inv;
  open_.perfect_rate += perf * inv;
  open_.snapshots += 1;
  if (iter == open_.last_iter) roll(iter + 1);  // window fully covered: close it
}

void Monitor::finalize_window(MonitorWindow& w) const {
  if (w.snapshots > 0) {
    w.connected_rate /= w.snapshots;
    w.success_rate /= w.snapshots;
    w.perfect_rate /= w.snapshots;
  }
  int best = 0;
  for (int p = 1; p < kPhaseCount; ++p) {
    if (phase_nodes_[static_cast<size_t>(p)] > phase_nodes_[static_cast<size_t>(best)]) best = p;
  }
  w.dominant_phase = phase_name(phase_from_index(best));
  w.dominant_phase_fraction =
      node_count_ > 0.0 ? phase_nodes_[static_cast<size_t>(best)] / node_count_ : 0.0;
  w.bifurcation_fraction = node_count_ > 0.0 ? bifurcation_nodes_ / node_count_ : 0.0;
  w.phase_collapse = w.dominant_phase_fraction > cfg_.phase_collapse_threshold;
  w.topology_collapse = w.bifurcation_fraction < cfg_.topology_collapse_threshold;
}

TrainResult train(const Dataset& dataset, const TrainConfig& cfg, TrainState& state,
                  const TrainHooks& hooks) {
  validate_config(cfg);
  if (dataset.members.empty()) throw std::invalid_argument("train: empty dataset");

  TrainResult res;
  Monitor monitor(cfg);
  GanModel& model = state.model;
  Rng& rng = state.rng;
  const std::vector<nn::Param*> gparams = model.gen.params();
  const std::vector<nn::Param*> dparams = model.disc.params();
  const std::vector<nn::Param*> all_params = model.params();

  for (int i = state.next_iter; i < cfg.max_iterations; ++i) {
    const Rollback rollback = snapshot_state(all_params, rng, i);
    bool diverged = false;
    double last_real = 0.0, last_fake = 0.0;
    int last_m = 0;

    try {
      const int critic_steps = schedule_iterations(i, cfg);
      for (int step = 0; step < critic_steps; ++step) {
        const DatasetMember& real =
            dataset.members[static_cast<size_t>(rng.below(dataset.members.size()))];
        last_m = real.graph.size();
        const Matrix z = draw_noise(last_m, cfg.noise_width, rng);
        const SoftGraph fake = generator_forward(model.gen, z);  // detached from the critic tape

        nn::Tape tape_real, tape_fake;
        const auto score_real = model.disc.forward(
            tape_real, tape_real.input(real.tensors.a_norm), tape_real.input(real.tensors.x_num),
            tape_real.input(real.tensors.x_cat_level), tape_real.input(real.tensors.x_cat_phase));
        const auto score_fake = model.disc.forward(
            tape_fake, tape_fake.input(fake.a_soft), tape_fake.input(fake.x_num),
            tape_fake.input(fake.x_cat_level), tape_fake.input(fake.x_cat_phase));

        nn::zero_grads(dparams);
        tape_real.backward(score_real, +1.0);  // ascend on the real score
        tape_fake.backward(score_fake, -1.0);  // ... minus the fake score
        for (nn::Param* p : dparams) {
          nn::rmsprop_step(*p, cfg.alpha, +1.0, cfg.rms_decay, cfg.rms_eps);
          nn::clip_weights(*p, cfg.clip);
        }
        last_real = tape_real.value(score_real).at(0, 0);
        last_fake = tape_fake.value(score_fake).at(0, 0);
        if (hooks.after_disc_step) hooks.after_disc_step(model, i, step);
      }

      // Generator update on a joint tape; the critic only relays gradient.
      const Matrix z = draw_noise(last_m, cfg.noise_width, rng);
      nn::Tape tape;
      const GenOut out = model.gen.forward(tape, tape.input(z));
      const auto score =
          model.disc.forward(tape, out.a_soft, out.x_num, out.x_cat_level, out.x_cat_phase);
      nn::zero_grads(gparams);
      nn::zero_grads(dparams);
      tape.backward(score, -1.0);  // descend on -D(fake)
      for (nn::Param* p : gparams) {
        nn::rmsprop_step(*p, cfg.alpha, -1.0, cfg.rms_decay, cfg.rms_eps);
      }
      nn::zero_grads(dparams);  // joint-tape critic gradients are discarded
    } catch (const std::runtime_error&) {
      diverged = true;  // non-finite forward pass
    }

    if (!diverged && (!std::isfinite(last_real) || !std::isfinite(last_fake))) diverged = true;
    if (diverged) {
      restore_state(rollback, all_params, rng);
      state.next_iter = rollback.iter;
      res.halted_divergence = true;
      break;
    }

    res.log.push_back({i + 1, last_real, last_fake, last_real - last_fake});
    state.next_iter = i + 1;
    if (hooks.on_log_row) hooks.on_log_row(res.log.back());
    if (hooks.after_gen_step) hooks.after_gen_step(model, i);

    if ((i + 1) % cfg.monitor_every == 0) {
      Rng srng(Rng::derive(cfg.seed, (1ULL << 32) + static_cast<uint64_t>(i + 1)));
      std::vector<SoftGraph> samples;
      samples.reserve(static_cast<size_t>(cfg.monitor_samples));
      for (int k = 0; k < cfg.monitor_samples; ++k) {
        const DatasetMember& member =
            dataset.members[static_cast<size_t>(srng.below(dataset.members.size()))];
        const Matrix z = draw_noise(member.graph.size(), cfg.noise_width, srng);
        samples.push_back(generator_forward(model.gen, z));
      }
      monitor.add_snapshot(i + 1, samples);
      if (hooks.on_snapshot) hooks.on_snapshot(i + 1, samples);
      if (cfg.early_stop && (i + 1) >= cfg.early_stop_min && (i + 1) <= cfg.early_stop_max &&
          monitor.last_window_collapsed()) {
        res.early_stopped_at = i + 1;
        break;
      }
    }
  }

  res.iterations_done = state.next_iter;
  res.monitor = monitor.windows();
  return res;
}

void save_train_state(const std::string& path, TrainState& state) {
  nn::Checkpoint ckpt;
  ckpt.meta["iter"] = std::to_string(state.next_iter);
  ckpt.meta["rng"] = state.rng.save_state();
  std::vector<const nn::Param*> params;
  for (nn::Param* p : state.model.params()) params.push_back(p);
  ckpt.save(path, params);
}

void load_train_state(const std::string& path, TrainState& state) {
  nn::Checkpoint ckpt;
  ckpt.load(path, state.model.params());
  const auto it_iter = ckpt.meta.find("iter");
  const auto it_rng = ckpt.meta.find("rng");
  if (it_iter == ckpt.meta.end() || it_rng == ckpt.meta.end()) {
    throw std::runtime_error("load_train_state: checkpoint missing iter/rng metadata");
  }
  state.next_iter = std::atoi(it_iter->second.c_str());
  state.rng.load_state(it_rng->second);
}

std::string format_training_log(const std::vector<TrainLogRow>& rows) {
  std::string out = "iter\treal\tfake\tdistance\n";
  char buf[160];
  for (const TrainLogRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t%.17g\n", r.iter, r.real_score,
                  r.fake_score, r.w_distance);
    out += buf;
  }
  return out;
}

std::vector<TrainLogRow> parse_training_log(const std::string& text) {
  std::vector<TrainLogRow> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;  // header
      continue;
    }
    if (line.empty()) continue;
    TrainLogRow r;
    if (std::sscanf(line.c_str(), "%d\t%lg\t%lg\t%lg", &r.iter, &r.real_score, &r.fake_score,
                    &r.w_distance) != 4) {
      throw std::runtime_error("parse_training_log: malformed row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace feedergen
