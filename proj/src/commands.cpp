#include "feedergen/commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "feedergen/corpus.hpp"
#include "feedergen/layout.hpp"
#include "feedergen/stats_io.hpp"
#include "feedergen/validate.hpp"

namespace fs = std::filesystem;

namespace feedergen {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * v);
  return buf;
}

double parse_double_value(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
  }
  return v;
}

int parse_int_value(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
  }
  return static_cast<int>(v);
}

uint64_t parse_u64_value(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
  }
  return static_cast<uint64_t>(v);
}

bool parse_bool_value(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + value +
                              "' (use 0/1/true/false)");
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const char* const kConfigKeys[] = {
    "alpha",        "clip",          "n_bootstrap",     "n0",
    "n1",           "n2",            "rms_decay",       "rms_eps",
    "noise_width",  "hidden1",       "hidden2",         "embed_width",
    "adj_rank",     "leaky_slope",   "ln_eps",          "seed",
    "iterations",   "monitor_every", "monitor_window",  "monitor_samples",
    "phase_collapse_threshold",      "topology_collapse_threshold",
    "early_stop",   "early_stop_min", "early_stop_max", "target_count",
    "min_nodes",    "stats_bins",    "tv_threshold",
};

Matrix draw_noise_matrix(int m, int width, Rng& rng) {
  Matrix z(m, width);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < width; ++c) z.at(r, c) = rng.normal();
  return z;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

void apply_config_kv(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  TrainConfig& t = cfg.train;
  if (key == "alpha") t.alpha = parse_double_value(key, value);
  else if (key == "clip") t.clip = parse_double_value(key, value);
  else if (key == "n_bootstrap") t.n_bootstrap = parse_int_value(key, value);
  else if (key == "n0") t.n0 = parse_int_value(key, value);
  else if (key == "n1") t.n1 = parse_int_value(key, value);
  else if (key == "n2") t.n2 = parse_int_value(key, value);
  else if (key == "rms_decay") t.rms_decay = parse_double_value(key, value);
  else if (key == "rms_eps") t.rms_eps = parse_double_value(key, value);
  else if (key == "noise_width") t.noise_width = parse_int_value(key, value);
  else if (key == "hidden1") t.hidden1 = parse_int_value(key, value);
  else if (key == "hidden2") t.hidden2 = parse_int_value(key, value);
  else if (key == "embed_width") t.embed_width = parse_int_value(key, value);
  else if (key == "adj_rank") t.adj_rank = parse_int_value(key, value);
  else if (key == "leaky_slope") t.leaky_slope = parse_double_value(key, value);
  else if (key == "ln_eps") t.ln_eps = parse_double_value(key, value);
  else if (key == "seed") t.seed = parse_u64_value(key, value);
  else if (key == "iterations") t.max_iterations = parse_int_value(key, value);
  else if (key == "monitor_every") t.monitor_every = parse_int_value(key, value);
  else if (key == "monitor_window") t.monitor_window = parse_int_value(key, value);
  else if (key == "monitor_samples") t.monitor_samples = parse_int_value(key, value);
  else if (key == "phase_collapse_threshold")
    t.phase_collapse_threshold = parse_double_value(key, value);
  else if (key == "topology_collapse_threshold")
    t.topology_collapse_threshold = parse_double_value(key, value);
  else if (key == "early_stop") t.early_stop = parse_bool_value(key, value);
  else if (key == "early_stop_min") t.early_stop_min = parse_int_value(key, value);
  else if (key == "early_stop_max") t.early_stop_max = parse_int_value(key, value);
  else if (key == "target_count") cfg.target_count = parse_int_value(key, value);
  else if (key == "min_nodes") cfg.min_nodes = parse_int_value(key, value);
  else if (key == "stats_bins") cfg.stats_bins = parse_int_value(key, value);
  else if (key == "tv_threshold") cfg.tv_threshold = parse_double_value(key, value);
  else {
    std::string keys;
    for (const char* k : kConfigKeys) {
      if (!keys.empty()) keys += ", ";
      keys += k;
    }
    throw std::invalid_argument("config: unknown key '" + key + "' (valid keys: " + keys + ")");
  }
}

PipelineConfig load_pipeline_config(const std::string& path) {
  PipelineConfig cfg;
  std::istringstream in(slurp(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_kv(cfg, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

std::string config_echo(const PipelineConfig& cfg) {
  const TrainConfig& t = cfg.train;
  std::ostringstream os;
  auto kv = [&os](const char* key, const std::string& value) {
    os << "# " << key << "=" << value << "\n";
  };
  kv("alpha", fmt_double(t.alpha));
  kv("clip", fmt_double(t.clip));
  kv("n_bootstrap", std::to_string(t.n_bootstrap));
  kv("n0", std::to_string(t.n0));
  kv("n1", std::to_string(t.n1));
  kv("n2", std::to_string(t.n2));
  kv("rms_decay", fmt_double(t.rms_decay));
  kv("rms_eps", fmt_double(t.rms_eps));
  kv("noise_width", std::to_string(t.noise_width));
  kv("hidden1", std::to_string(t.hidden1));
  kv("hidden2", std::to_string(t.hidden2));
  kv("embed_width", std::to_string(t.embed_width));
  kv("adj_rank", std::to_string(t.adj_rank));
  kv("leaky_slope", fmt_double(t.leaky_slope));
  kv("ln_eps", fmt_double(t.ln_eps));
  kv("seed", std::to_string(t.seed));
  kv("iterations", std::to_string(t.max_iterations));
  kv("monitor_every", std::to_string(t.monitor_every));
  kv("monitor_window", std::to_string(t.monitor_window));
  kv("monitor_samples", std::to_string(t.monitor_samples));
  kv("phase_collapse_threshold", fmt_double(t.phase_collapse_threshold));
  kv("topology_collapse_threshold", fmt_double(t.topology_collapse_threshold));
  kv("early_stop", t.early_stop ? "1" : "0");
  kv("early_stop_min", std::to_string(t.early_stop_min));
  kv("early_stop_max", std::to_string(t.early_stop_max));
  kv("target_count", std::to_string(cfg.target_count));
  kv("min_nodes", std::to_string(cfg.min_nodes));
  kv("stats_bins", std::to_string(cfg.stats_bins));
  kv("tv_threshold", fmt_double(cfg.tv_threshold));
  return os.str();
}

std::vector<std::string> list_feeder_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir + " is not a directory");
  std::vector<std::string> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".feeder") {
      files.push_back(e.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

FeederGraph load_feeder_graph(const std::string& path) {
  const RawFeederModel raw = parse_feeder_path(path);
  return compute_topological_features(device_as_node(raw));
}

int cmd_corpus(const std::string& out_dir, int count, int min_m, int max_m, uint64_t seed,
               std::ostream& err) {
  try {
    ensure_dir(out_dir);
    const std::vector<FeederGraph> graphs = make_corpus(count, min_m, max_m, seed);
    const std::vector<std::string> names = write_corpus(out_dir, graphs);
    err << "corpus: wrote " << names.size() << " feeders to " << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_ingest(const std::vector<std::string>& files, const std::string& out_dir, int stats_bins,
               std::ostream& err) {
  try {
    if (files.empty()) throw std::invalid_argument("ingest: no input files");
    ensure_dir(out_dir);
    std::vector<FeederGraph> graphs;
    std::vector<std::string> written;
    for (const std::string& path : files) {
      std::vector<std::string> warnings;
      RawFeederModel raw;
      try {
        raw = parse_feeder_path(path, &warnings);
      } catch (const ParseError& e) {
        err << "error: " << path << ":" << e.what() << "\n";
        return 1;
      }
      for (const std::string& w : warnings) err << path << ": warning: " << w << "\n";
      const FeederGraph g = compute_topological_features(device_as_node(raw));
      const std::string name = fs::path(path).filename().string();
      const std::string out_path = (fs::path(out_dir) / name).string();
      write_text_file(out_path, export_feeder_model(g));
      written.push_back(name);
      graphs.push_back(g);
      err << name << ": " << g.size() << " nodes, " << g.edge_count() << " edges\n";
    }
    const StatsFile sf = stats_from_corpus(graphs, stats_bins);
    write_stats_path((fs::path(out_dir) / "stats.txt").string(), sf);
    std::string manifest = join(written, "\n");
    if (!manifest.empty()) manifest += "\n";
    manifest += "stats.txt\n";
    write_text_file((fs::path(out_dir) / "manifest.txt").string(), manifest);
    err << "ingest: " << graphs.size() << " graphs written to " << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_stats(const std::vector<std::string>& files, const std::string& out_path, int bins,
              std::ostream& err) {
  try {
    if (files.empty()) throw std::invalid_argument("stats: no input files");
    std::vector<FeederGraph> graphs;
    for (const std::string& path : files) graphs.push_back(load_feeder_graph(path));
    write_stats_path(out_path, stats_from_corpus(graphs, bins));
    err << "stats: derived from " << graphs.size() << " feeders -> " << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sample(const std::string& corpus_dir, const std::string& out_dir, int count, int min_nodes,
               uint64_t seed, std::ostream& err) {
  try {
    const std::vector<std::string> files = list_feeder_files(corpus_dir);
    if (files.empty()) throw std::runtime_error("sample: no .feeder files in " + corpus_dir);
    std::vector<FeederGraph> sources;
    std::vector<std::string> names;
    for (const std::string& path : files) {
      sources.push_back(load_feeder_graph(path));
      names.push_back(fs::path(path).stem().string());
    }
    const int target = count == 0 ? static_cast<int>(sources.size()) : count;
    const Dataset ds = build_dataset(sources, names, target, min_nodes, seed);
    ensure_dir(out_dir);
    std::string index;
    char buf[64];
    for (size_t i = 0; i < ds.members.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "member_%03zu.feeder", i);
      write_text_file((fs::path(out_dir) / buf).string(),
                      export_feeder_model(ds.members[i].graph));
      index += std::string(buf) + "\t" + ds.members[i].origin + "\n";
    }
    write_text_file((fs::path(out_dir) / "index.txt").string(), index);
    err << "sample: " << ds.members.size() << " dataset members (" << sources.size()
        << " sources) written to " << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_train(const std::string& data_dir, const std::string& out_dir, const PipelineConfig& cfg,
              const std::string& resume_checkpoint, std::ostream& err) {
  try {
    const std::vector<std::string> files = list_feeder_files(data_dir);
    if (files.empty()) throw std::runtime_error("train: no .feeder files in " + data_dir);
    std::vector<FeederGraph> sources;
    std::vector<std::string> names;
    for (const std::string& path : files) {
      sources.push_back(load_feeder_graph(path));
      names.push_back(fs::path(path).stem().string());
    }
    const int target = cfg.target_count == 0 ? static_cast<int>(sources.size()) : cfg.target_count;
    const Dataset ds = build_dataset(sources, names, target, cfg.min_nodes, cfg.train.seed);
    err << "train: dataset has " << ds.members.size() << " members from " << sources.size()
        << " source feeders\n";

    ensure_dir(out_dir);
    write_stats_path((fs::path(out_dir) / "stats.txt").string(),
                     stats_from_corpus(sources, cfg.stats_bins));

    TrainState state(cfg.train);
    if (!resume_checkpoint.empty()) {
      load_train_state(resume_checkpoint, state);
      err << "train: resumed from " << resume_checkpoint << " at iteration " << state.next_iter
          << "\n";
    }

    const std::string log_path = (fs::path(out_dir) / "train_log.tsv").string();
    std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
    if (!log) throw std::runtime_error("cannot write " + log_path);
    log << config_echo(cfg);
    log << "iter\treal\tfake\tdistance\n";

    TrainHooks hooks;
    hooks.on_log_row = [&log, &err](const TrainLogRow& r) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t%.17g\n", r.iter, r.real_score,
                    r.fake_score, r.w_distance);
      log << buf;
      if (r.iter % 100 == 0) {
        log.flush();
        std::snprintf(buf, sizeof(buf), "iter %d: distance %.6g\n", r.iter, r.w_distance);
        err << buf;
      }
    };
    hooks.after_gen_step = [&state, &out_dir](const GanModel&, int iter) {
      if ((iter + 1) % 500 == 0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "checkpoint_%06d.ckpt", iter + 1);
        save_train_state((fs::path(out_dir) / buf).string(), state);
      }
    };

    const TrainResult res = train(ds, cfg.train, state, hooks);
    log.flush();

    save_train_state((fs::path(out_dir) / "checkpoint_final.ckpt").string(), state);

    std::ostringstream mon;
    mon << "first\tlast\tsnapshots\tconnected\tsuccess\tperfect\tdominant_phase"
           "\tdominant_fraction\tbifurcation_fraction\tphase_collapse\ttopology_collapse\n";
    for (const MonitorWindow& w : res.monitor) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%d\t%d\t%d\t%.6f\t%.6f\t%.6f\t%s\t%.6f\t%.6f\t%d\t%d\n",
                    w.first_iter, w.last_iter, w.snapshots, w.connected_rate, w.success_rate,
                    w.perfect_rate, w.dominant_phase.c_str(), w.dominant_phase_fraction,
                    w.bifurcation_fraction, w.phase_collapse ? 1 : 0, w.topology_collapse ? 1 : 0);
      mon << buf;
    }
    write_text_file((fs::path(out_dir) / "monitor.tsv").string(), mon.str());

    if (res.early_stopped_at >= 0) {
      err << "train: early stop at iteration " << res.early_stopped_at
          << " (mode collapse detected)\n";
    }
    err << "train: " << res.iterations_done << " iterations done; artifacts in " << out_dir
        << "\n";
    if (res.halted_divergence) {
      err << "error: training diverged (non-finite scores); model rolled back to iteration "
          << state.next_iter << " and checkpointed\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_generate(const std::string& checkpoint, const std::string& stats_path,
                 const std::string& out_dir, int count, int m_min, int m_max,
                 const PipelineConfig& cfg, uint64_t seed, std::ostream& err) {
  try {
    if (count < 1) throw std::invalid_argument("generate: count must be >= 1");
    if (m_min < 2 || m_max < m_min) {
      throw std::invalid_argument("generate: need 2 <= m_min <= m_max");
    }
    const StatsFile sf = read_stats_path(stats_path);
    TrainState state(cfg.train);
    load_train_state(checkpoint, state);
    ensure_dir(out_dir);

    std::string report;
    std::vector<std::string> artifacts;
    int accepted = 0;
    char buf[256];
    for (int k = 0; k < count; ++k) {
      Rng rng(Rng::derive(seed, static_cast<uint64_t>(k)));
      const int m = m_min + static_cast<int>(rng.below(static_cast<uint64_t>(m_max - m_min + 1)));
      std::snprintf(buf, sizeof(buf), "sample_%03d\tm=%d", k, m);
      std::string line = buf;

      SoftGraph sg;
      try {
        const Matrix z = draw_noise_matrix(m, cfg.train.noise_width, rng);
        sg = generator_forward(state.model.gen, z);
      } catch (const std::runtime_error& e) {
        report += line + "\trejected=non-finite-output\n";
        err << "sample " << k << ": " << e.what() << "\n";
        continue;
      }

      const RateSet rates = pipeline_rates(sg, sf.scales, sf.normamps_table);
      const Matrix a_bin = reconstruct_adjacency(sg.a_soft);
      const std::vector<CandidateTopology> cands = permute_feeder_head(a_bin);
      std::snprintf(buf, sizeof(buf), "\theads=%zu\tconnected=%s\tsuccess=%s\tperfect=%s",
                    cands.size(), fmt_rate(rates.connected).c_str(),
                    fmt_rate(rates.success).c_str(), fmt_rate(rates.perfect).c_str());
      line += buf;
      if (cands.empty()) {
        report += line + "\trejected=no-connected-head\n";
        continue;
      }

      const CandidateTopology& cand = cands.front();
      const std::vector<DeviceAttributes> attrs =
          reconstruct_attributes(sg, sf.scales, sf.normamps_table);
      const FeederGraph topology = candidate_to_graph(cand, m);
      const std::vector<Phase> phases = assign_phases_guided(topology, sg.x_cat_phase);
      const FeederGraph g = realize_feeder(cand, m, attrs, phases);
      if (!validate_radial(g).empty() || !check_perfect(g)) {
        report += line + "\trejected=reconstruction-check-failed\n";
        err << "sample " << k << ": reconstruction self-check failed\n";
        continue;
      }

      const ScreenResult screen = empirical_screen(g, sf.stats);
      if (!screen.pass) {
        report += line + "\tscreen=fail\treasons=" + join(screen.reasons, "; ") + "\n";
        continue;
      }

      std::snprintf(buf, sizeof(buf), "gen_%03d", k);
      const std::string stem = buf;
      write_text_file((fs::path(out_dir) / (stem + ".feeder")).string(), export_feeder_model(g));
      write_text_file((fs::path(out_dir) / (stem + ".svg")).string(),
                      emit_svg(g, compute_pseudo_coordinates(g)));
      artifacts.push_back(stem + ".feeder");
      artifacts.push_back(stem + ".svg");
      report += line + "\tscreen=pass\tfile=" + stem + ".feeder\n";
      ++accepted;
    }

    write_text_file((fs::path(out_dir) / "report.txt").string(), report);
    artifacts.push_back("report.txt");
    write_text_file((fs::path(out_dir) / "manifest.txt").string(), join(artifacts, "\n") + "\n");
    err << "generate: " << accepted << "/" << count << " samples accepted; artifacts in "
        << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_validate(const std::vector<std::string>& files, const std::string& stats_path,
                 std::ostream& err) {
  try {
    if (files.empty()) throw std::invalid_argument("validate: no input files");
    const StatsFile sf = read_stats_path(stats_path);
    int failures = 0;
    for (const std::string& path : files) {
      try {
        const FeederGraph g = load_feeder_graph(path);
        const std::vector<RadialViolation> violations = validate_radial(g);
        const ScreenResult screen = empirical_screen(g, sf.stats);
        const bool ok = violations.empty() && screen.pass;
        err << path << ": radial=" << (violations.empty() ? "ok" : "violated")
            << " screen=" << (screen.pass ? "pass" : "fail");
        if (!screen.pass) err << " (" << join(screen.reasons, "; ") << ")";
        err << "\n";
        if (!ok) ++failures;
      } catch (const std::exception& e) {
        err << path << ": error: " << e.what() << "\n";
        ++failures;
      }
    }
    if (failures > 0) {
      err << "validate: " << failures << "/" << files.size() << " files failed\n";
      return 1;
    }
    err << "validate: all " << files.size() << " files pass\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_baseline(int m, int trials, uint64_t seed, const std::string& checkpoint,
                 const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (m < 2 || trials < 1) throw std::invalid_argument("baseline: need m >= 2 and trials >= 1");
    err << "baseline: " << trials << " random-matrix trials at m=" << m << "\n";
    const RateSet base = random_baseline(m, trials, seed);

    TrainState state(cfg.train);
    load_train_state(checkpoint, state);
    const FeatureScales scales;  // both columns decode through the same default scales
    RateSet model;
    int failed = 0;
    for (int t = 0; t < trials; ++t) {
      Rng rng(Rng::derive(seed, static_cast<uint64_t>(t)));
      try {
        const Matrix z = draw_noise_matrix(m, cfg.train.noise_width, rng);
        const SoftGraph sg = generator_forward(state.model.gen, z);
        const RateSet r = pipeline_rates(sg, scales);
        model.connected += r.connected;
        model.success += r.success;
        model.perfect += r.perfect;
      } catch (const std::runtime_error&) {
        ++failed;  // counts as an all-zero trial
      }
    }
    model.connected /= trials;
    model.success /= trials;
    model.perfect /= trials;
    if (failed > 0) err << "baseline: " << failed << " model trials produced non-finite output\n";

    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-16s%-16s%s\n", "Metric", "Random Matrix", "Model");
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-16s%-16s%s\n", "Connected rate",
                  fmt_percent(base.connected).c_str(), fmt_percent(model.connected).c_str());
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-16s%-16s%s\n", "Success rate",
                  fmt_percent(base.success).c_str(), fmt_percent(model.success).c_str());
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-16s%-16s%s\n", "Perfect rate",
                  fmt_percent(base.perfect).c_str(), fmt_percent(model.perfect).c_str());
    out << buf;
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_plot(const std::string& feeder_file, const std::string& out_svg, std::ostream& err) {
  try {
    const FeederGraph g = load_feeder_graph(feeder_file);
    write_text_file(out_svg, emit_svg(g, compute_pseudo_coordinates(g)));
    err << "plot: " << feeder_file << " -> " << out_svg << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace feedergen
