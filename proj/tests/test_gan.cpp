#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "feedergen/augment.hpp"
#include "feedergen/corpus.hpp"
#include "feedergen/gan.hpp"
#include "feedergen/matrix.hpp"

using feedergen::Dataset;
using feedergen::FeederGraph;
using feedergen::GanModel;
using feedergen::Matrix;
using feedergen::Monitor;
using feedergen::Rng;
using feedergen::SoftGraph;
using feedergen::TrainConfig;
using feedergen::TrainHooks;
using feedergen::TrainLogRow;
using feedergen::TrainResult;
using feedergen::TrainState;

namespace {

Matrix gaussian_noise(int m, int width, Rng& rng) {
  Matrix z(m, width);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < width; ++c) z.at(r, c) = rng.normal();
  }
  return z;
}

Dataset small_dataset(uint64_t seed = 7) {
  const std::vector<FeederGraph> sources = feedergen::make_corpus(3, 20, 26, seed);
  return feedergen::build_dataset(sources, {"f0", "f1", "f2"}, 3, 10, 42);
}

TrainConfig smoke_config() {
  TrainConfig cfg;
  cfg.n_bootstrap = 2;
  cfg.n0 = 5;
  cfg.n1 = 6;
  cfg.n2 = 2;
  cfg.max_iterations = 6;
  cfg.monitor_every = 2;
  cfg.monitor_window = 4;
  cfg.monitor_samples = 1;
  cfg.early_stop = false;
  cfg.seed = 11;
  return cfg;
}

std::vector<Matrix> param_values(GanModel& model) {
  std::vector<Matrix> out;
  for (const feedergen::nn::Param* p : model.params()) out.push_back(p->value);
  return out;
}

// A hand-built relaxed sample: explicit binary-ish adjacency plus one-hot
// attribute rows, shaped like real generator output.
SoftGraph soft_sample(const Matrix& a_soft, const std::vector<int>& phase_index) {
  const int m = a_soft.rows();
  SoftGraph sg;
  sg.a_soft = a_soft;
  sg.x_num = Matrix(m, 4);
  sg.x_cat_level = Matrix(m, feedergen::kLevelOneHot);
  sg.x_cat_phase = Matrix(m, feedergen::kPhaseCount);
  for (int r = 0; r < m; ++r) {
    sg.x_cat_level.at(r, 0) = 1.0;
    sg.x_cat_phase.at(r, phase_index[static_cast<size_t>(r)]) = 1.0;
  }
  return sg;
}

Matrix chain_adjacency(int m) {
  Matrix a(m, m);
  for (int r = 0; r + 1 < m; ++r) a.at(r, r + 1) = 1.0;
  return a;
}

Matrix fan_adjacency(int m) {
  Matrix a(m, m);
  for (int c = 1; c < m; ++c) a.at(0, c) = 1.0;
  return a;
}

}  // namespace

TEST_CASE("generator output satisfies the relaxation invariants") {
  const TrainConfig cfg;
  TrainState state(cfg);
  Rng noise(99);
  const int m = 17;
  const Matrix z = gaussian_noise(m, cfg.noise_width, noise);
  const SoftGraph sg = feedergen::generator_forward(state.model.gen, z);

  REQUIRE(sg.a_soft.rows() == m);
  REQUIRE(sg.a_soft.cols() == m);
  REQUIRE(sg.x_num.rows() == m);
  REQUIRE(sg.x_num.cols() == 4);
  REQUIRE(sg.x_cat_level.cols() == feedergen::kLevelOneHot);
  REQUIRE(sg.x_cat_phase.cols() == feedergen::kPhaseCount);

  for (int c = 0; c < m; ++c) {
    double colsum = 0.0;
    for (int r = 0; r < m; ++r) {
      CHECK(sg.a_soft.at(r, c) >= 0.0);
      colsum += sg.a_soft.at(r, c);
    }
    CHECK(colsum == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < 4; ++c) {
      CHECK(sg.x_num.at(r, c) >= -1.0);
      CHECK(sg.x_num.at(r, c) <= 1.0);
    }
    double lsum = 0.0, psum = 0.0;
    for (int c = 0; c < sg.x_cat_level.cols(); ++c) lsum += sg.x_cat_level.at(r, c);
    for (int c = 0; c < sg.x_cat_phase.cols(); ++c) psum += sg.x_cat_phase.at(r, c);
    CHECK(lsum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Same noise, same weights: bitwise identical output.
  const SoftGraph again = feedergen::generator_forward(state.model.gen, z);
  CHECK(again.a_soft == sg.a_soft);
  CHECK(again.x_num == sg.x_num);
  CHECK(again.x_cat_level == sg.x_cat_level);
  CHECK(again.x_cat_phase == sg.x_cat_phase);
}

TEST_CASE("fresh models with the same seed start identical") {
  const TrainConfig cfg;
  TrainState a(cfg);
  TrainState b(cfg);
  const auto va = param_values(a.model);
  const auto vb = param_values(b.model);
  REQUIRE(va.size() == vb.size());
  for (size_t i = 0; i < va.size(); ++i) CHECK(va[i] == vb[i]);
}

TEST_CASE("critic scores are finite, repeatable, and permutation invariant") {
  const TrainConfig cfg;
  TrainState state(cfg);
  const Dataset ds = small_dataset();
  Rng rng(5);

  for (const auto& member : ds.members) {
    const double s1 = feedergen::discriminator_score(state.model.disc, member.tensors);
    const double s2 = feedergen::discriminator_score(state.model.disc, member.tensors);
    CHECK(std::isfinite(s1));
    CHECK(s1 == s2);

    const int m = member.tensors.a_norm.rows();
    std::vector<int> perm(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) perm[static_cast<size_t>(i)] = i;
    for (int i = m - 1; i > 0; --i) {
      const int j = rng.below(i + 1);
      std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
    }

    auto permute_rows = [&](const Matrix& x) {
      Matrix out(x.rows(), x.cols());
      for (int r = 0; r < x.rows(); ++r) {
        for (int c = 0; c < x.cols(); ++c) out.at(r, c) = x.at(perm[static_cast<size_t>(r)], c);
      }
      return out;
    };
    Matrix a_perm(m, m);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        a_perm.at(r, c) =
            member.tensors.a_norm.at(perm[static_cast<size_t>(r)], perm[static_cast<size_t>(c)]);
      }
    }
    const double s3 = feedergen::discriminator_score(
        state.model.disc, a_perm, permute_rows(member.tensors.x_num),
        permute_rows(member.tensors.x_cat_level), permute_rows(member.tensors.x_cat_phase));
    CHECK(std::fabs(s3 - s1) <= 1e-9);
  }
}

TEST_CASE("score gap is the difference of critic scores") {
  CHECK(feedergen::wasserstein_distance(3.5, 1.25) == 2.25);
  CHECK(feedergen::wasserstein_distance(-1.0, 2.0) == -3.0);
}

TEST_CASE("critic step schedule: long while bootstrapping and on the cadence") {
  const TrainConfig cfg;  // n_bootstrap=20, n0=500, n1=1000, n2=5
  CHECK(feedergen::schedule_iterations(0, cfg) == 1000);
  CHECK(feedergen::schedule_iterations(19, cfg) == 1000);
  CHECK(feedergen::schedule_iterations(20, cfg) == 5);
  CHECK(feedergen::schedule_iterations(25, cfg) == 5);
  CHECK(feedergen::schedule_iterations(499, cfg) == 5);
  CHECK(feedergen::schedule_iterations(500, cfg) == 1000);
  CHECK(feedergen::schedule_iterations(501, cfg) == 5);
  CHECK(feedergen::schedule_iterations(1000, cfg) == 1000);
  CHECK_THROWS_AS(feedergen::schedule_iterations(-1, cfg), std::invalid_argument);
}

TEST_CASE("training smoke run: logs, determinism, clamping, staged updates") {
  const Dataset ds = small_dataset();
  const TrainConfig cfg = smoke_config();

  TrainState state(cfg);
  int disc_steps_iter0 = 0;
  int disc_steps_iter2 = 0;
  bool clip_ok = true;
  bool gen_frozen_in_critic_loop = true;
  std::vector<Matrix> gen_at_step0;
  TrainHooks hooks;
  hooks.after_disc_step = [&](const GanModel& model, int iter, int inner) {
    if (iter == 0) ++disc_steps_iter0;
    if (iter == 2) ++disc_steps_iter2;
    GanModel& m = const_cast<GanModel&>(model);
    for (const feedergen::nn::Param* p : m.disc.params()) {
      for (size_t i = 0; i < p->value.size(); ++i) {
        if (std::fabs(p->value.data()[i]) > cfg.clip) clip_ok = false;
      }
    }
    std::vector<Matrix> gen_now;
    for (const feedergen::nn::Param* p : m.gen.params()) gen_now.push_back(p->value);
    if (inner == 0) {
      gen_at_step0 = gen_now;
    } else {
      for (size_t i = 0; i < gen_now.size(); ++i) {
        if (!(gen_now[i] == gen_at_step0[i])) gen_frozen_in_critic_loop = false;
      }
    }
  };
  const TrainResult res = feedergen::train(ds, cfg, state, hooks);

  CHECK(disc_steps_iter0 == cfg.n1);  // bootstrap iteration
  CHECK(disc_steps_iter2 == cfg.n2);  // steady state
  CHECK(clip_ok);
  CHECK(gen_frozen_in_critic_loop);

  REQUIRE(static_cast<int>(res.log.size()) == cfg.max_iterations);
  for (int k = 0; k < cfg.max_iterations; ++k) {
    const TrainLogRow& row = res.log[static_cast<size_t>(k)];
    CHECK(row.iter == k + 1);
    CHECK(std::isfinite(row.real_score));
    CHECK(std::isfinite(row.fake_score));
    CHECK(row.w_distance == row.real_score - row.fake_score);
  }
  CHECK(res.iterations_done == cfg.max_iterations);
  CHECK(state.next_iter == cfg.max_iterations);
  CHECK_FALSE(res.halted_divergence);
  CHECK(res.early_stopped_at == -1);

  // Snapshots at 2 and 4 fill the (0, 4] window; the one at 6 stays open.
  REQUIRE(res.monitor.size() == 1);
  CHECK(res.monitor[0].first_iter == 0);
  CHECK(res.monitor[0].last_iter == 4);
  CHECK(res.monitor[0].snapshots == 2);
  CHECK(res.monitor[0].connected_rate >= 0.0);
  CHECK(res.monitor[0].connected_rate <= 1.0);
  CHECK(res.monitor[0].success_rate <= res.monitor[0].connected_rate);
  CHECK(res.monitor[0].perfect_rate <= res.monitor[0].success_rate);

  // Same dataset, config, and seed: the whole run replays bitwise.
  TrainState replay(cfg);
  const TrainResult res2 = feedergen::train(ds, cfg, replay);
  REQUIRE(res2.log.size() == res.log.size());
  for (size_t k = 0; k < res.log.size(); ++k) {
    CHECK(res2.log[k].real_score == res.log[k].real_score);
    CHECK(res2.log[k].fake_score == res.log[k].fake_score);
  }
  const auto before = param_values(state.model);
  const auto after = param_values(replay.model);
  for (size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
}

TEST_CASE("a non-finite iteration rolls back and halts") {
  const Dataset ds = small_dataset();
  TrainConfig cfg = smoke_config();
  cfg.max_iterations = 5;

  TrainState state(cfg);
  std::vector<Matrix> params_after_iter1;
  bool corrupted = false;
  TrainHooks hooks;
  hooks.after_gen_step = [&](const GanModel& model, int iter) {
    if (iter == 1) params_after_iter1 = param_values(const_cast<GanModel&>(model));
  };
  hooks.after_disc_step = [&](const GanModel& model, int iter, int inner) {
    if (iter == 2 && inner == 0 && !corrupted) {
      corrupted = true;
      feedergen::nn::Param* p = const_cast<GanModel&>(model).disc.params().front();
      p->value.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
    }
  };
  const TrainResult res = feedergen::train(ds, cfg, state, hooks);

  CHECK(res.halted_divergence);
  CHECK(res.iterations_done == 2);
  CHECK(state.next_iter == 2);
  REQUIRE(res.log.size() == 2);
  // The rollback restores the exact state reached after iteration 2's log row.
  const auto now = param_values(state.model);
  REQUIRE(now.size() == params_after_iter1.size());
  for (size_t i = 0; i < now.size(); ++i) CHECK(now[i] == params_after_iter1[i]);
}

TEST_CASE("rejects impossible configurations") {
  const Dataset ds = small_dataset();
  TrainConfig cfg = smoke_config();
  cfg.monitor_window = 3;  // not a multiple of monitor_every=2
  TrainState state(smoke_config());
  CHECK_THROWS_AS(feedergen::train(ds, cfg, state), std::invalid_argument);
  TrainConfig bad = smoke_config();
  bad.alpha = 0.0;
  CHECK_THROWS_AS(feedergen::train(ds, bad, state), std::invalid_argument);
  CHECK_THROWS_AS(feedergen::train(Dataset{}, smoke_config(), state), std::invalid_argument);
}

TEST_CASE("monitor flags phase collapse when one phase dominates a window") {
  TrainConfig cfg;
  cfg.monitor_every = 1;
  cfg.monitor_window = 2;
  Monitor mon(cfg);

  const int abc = 6;
  const std::vector<int> all_abc(5, abc);
  mon.add_snapshot(1, {soft_sample(fan_adjacency(5), all_abc)});
  CHECK(mon.windows().empty());  // window (0, 2] still open
  mon.add_snapshot(2, {soft_sample(fan_adjacency(5), all_abc)});
  REQUIRE(mon.windows().size() == 1);
  CHECK(mon.windows()[0].dominant_phase == "abc");
  CHECK(mon.windows()[0].dominant_phase_fraction == doctest::Approx(1.0));
  CHECK(mon.windows()[0].phase_collapse);
  CHECK_FALSE(mon.windows()[0].topology_collapse);  // the fan keeps a bifurcation
  CHECK(mon.last_window_collapsed());
}

TEST_CASE("monitor flags topology collapse when bifurcations vanish") {
  TrainConfig cfg;
  cfg.monitor_every = 1;
  cfg.monitor_window = 1;
  Monitor mon(cfg);

  const std::vector<int> mixed{0, 1, 2, 6, 3};  // a, b, c, abc, ab
  mon.add_snapshot(1, {soft_sample(chain_adjacency(5), mixed)});
  REQUIRE(mon.windows().size() == 1);
  CHECK(mon.windows()[0].bifurcation_fraction == doctest::Approx(0.0));
  CHECK(mon.windows()[0].topology_collapse);
  CHECK_FALSE(mon.windows()[0].phase_collapse);
  CHECK(mon.last_window_collapsed());
}

TEST_CASE("monitor stays quiet on a healthy mix") {
  TrainConfig cfg;
  cfg.monitor_every = 1;
  cfg.monitor_window = 1;
  Monitor mon(cfg);

  const std::vector<int> mixed{6, 0, 1, 2, 6};  // abc-heavy but far from dominant
  mon.add_snapshot(1, {soft_sample(fan_adjacency(5), mixed)});
  REQUIRE(mon.windows().size() == 1);
  CHECK(mon.windows()[0].dominant_phase_fraction == doctest::Approx(0.4));
  CHECK(mon.windows()[0].bifurcation_fraction == doctest::Approx(0.2));
  CHECK_FALSE(mon.windows()[0].phase_collapse);
  CHECK_FALSE(mon.windows()[0].topology_collapse);
  CHECK_FALSE(mon.last_window_collapsed());
}

TEST_CASE("checkpoints restore parameters, draw stream, and progress exactly") {
  const Dataset ds = small_dataset();
  TrainConfig cfg = smoke_config();
  cfg.max_iterations = 3;
  TrainState state(cfg);
  feedergen::train(ds, cfg, state);

  const std::string path = std::string("/tmp/feedergen_ckpt_") + std::to_string(::getpid());
  feedergen::save_train_state(path, state);

  TrainConfig other = cfg;
  other.seed = 999;  // different init; the checkpoint must overwrite all of it
  TrainState loaded(other);
  feedergen::load_train_state(path, loaded);
  std::remove(path.c_str());

  CHECK(loaded.next_iter == state.next_iter);
  CHECK(loaded.rng.save_state() == state.rng.save_state());
  const auto a = param_values(state.model);
  const auto b = param_values(loaded.model);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("a resumed run continues the original trajectory bitwise") {
  const Dataset ds = small_dataset();
  TrainConfig cfg = smoke_config();
  cfg.max_iterations = 4;

  TrainState straight(cfg);
  const TrainResult full = feedergen::train(ds, cfg, straight);

  TrainConfig half = cfg;
  half.max_iterations = 2;
  TrainState paused(half);
  const TrainResult first = feedergen::train(ds, half, paused);
  const std::string path = std::string("/tmp/feedergen_resume_") + std::to_string(::getpid());
  feedergen::save_train_state(path, paused);

  TrainState resumed(cfg);
  feedergen::load_train_state(path, resumed);
  std::remove(path.c_str());
  const TrainResult second = feedergen::train(ds, cfg, resumed);

  REQUIRE(first.log.size() == 2);
  REQUIRE(second.log.size() == 2);
  REQUIRE(full.log.size() == 4);
  for (int k = 0; k < 4; ++k) {
    const TrainLogRow& got = k < 2 ? first.log[static_cast<size_t>(k)]
                                   : second.log[static_cast<size_t>(k - 2)];
    CHECK(got.iter == full.log[static_cast<size_t>(k)].iter);
    CHECK(got.real_score == full.log[static_cast<size_t>(k)].real_score);
    CHECK(got.fake_score == full.log[static_cast<size_t>(k)].fake_score);
  }
  CHECK(second.iterations_done == 4);
  const auto a = param_values(straight.model);
  const auto b = param_values(resumed.model);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("training log text roundtrips") {
  std::vector<TrainLogRow> rows;
  Rng rng(3);
  for (int i = 1; i <= 40; ++i) {
    TrainLogRow r;
    r.iter = i;
    r.real_score = rng.normal() * 13.7;
    r.fake_score = rng.normal() / 3.0;
    r.w_distance = r.real_score - r.fake_score;
    rows.push_back(r);
  }
  const std::string text = feedergen::format_training_log(rows);
  CHECK(text.rfind("iter\treal\tfake\tdistance\n", 0) == 0);
  const auto back = feedergen::parse_training_log(text);
  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].iter == rows[i].iter);
    CHECK(back[i].real_score == rows[i].real_score);
    CHECK(back[i].fake_score == rows[i].fake_score);
    CHECK(back[i].w_distance == rows[i].w_distance);
  }
}
