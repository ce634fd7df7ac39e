#include "feedergen/stats_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace feedergen {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += fmt(vs[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const char* begin = item.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
      throw std::runtime_error("stats file: malformed number '" + item + "' in " + key);
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("stats file: empty list for " + key);
  return out;
}

FractionRange parse_range(const std::string& s, const std::string& key) {
  const std::vector<double> v = parse_list(s, key);
  if (v.size() != 2) throw std::runtime_error("stats file: " + key + " needs exactly lo,hi");
  return {v[0], v[1]};
}

}  // namespace

std::string write_stats_text(const StatsFile& s) {
  std::string out;
  out += "# feeder corpus statistics\n";
  out += "max_level=" + std::to_string(s.stats.max_level) + "\n";
  out += "level_range=" + std::to_string(s.stats.level_range_lo) + "," +
         std::to_string(s.stats.level_range_hi) + "\n";
  out += "tv_threshold=" + fmt(s.stats.tv_threshold) + "\n";
  for (int f = 0; f < FeatureScales::kFeatureCount; ++f) {
    const FeatureRange& r = s.scales.range(f);
    out += std::string("scale.") + FeatureScales::feature_name(f) + "=" + fmt(r.lo) + "," +
           fmt(r.hi) + "\n";
  }
  out += "normamps_table=" + fmt_list(s.normamps_table) + "\n";
  for (const auto& [key, r] : s.stats.phase_fraction) {
    out += "phase." + key + "=" + fmt(r.lo) + "," + fmt(r.hi) + "\n";
  }
  for (const auto& [key, r] : s.stats.outdeg_fraction) {
    out += "outdeg." + key + "=" + fmt(r.lo) + "," + fmt(r.hi) + "\n";
  }
  out += "[length_histogram]\n";
  out += "edges=" + fmt_list(s.stats.length_hist.edges) + "\n";
  out += "fractions=" + fmt_list(s.stats.length_hist.fractions) + "\n";
  return out;
}

StatsFile read_stats_text(const std::string& text) {
  StatsFile s;
  s.stats.phase_fraction.clear();
  s.stats.outdeg_fraction.clear();

  std::istringstream in(text);
  std::string line;
  bool saw_any = false;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    if (line == "[length_histogram]") continue;  // section marker; keys are unambiguous

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("stats file: expected key=value, got '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    saw_any = true;

    if (key == "max_level") {
      s.stats.max_level = std::atoi(val.c_str());
    } else if (key == "level_range") {
      const FractionRange r = parse_range(val, key);
      s.stats.level_range_lo = static_cast<int>(r.lo);
      s.stats.level_range_hi = static_cast<int>(r.hi);
    } else if (key == "tv_threshold") {
      s.stats.tv_threshold = std::strtod(val.c_str(), nullptr);
    } else if (key.rfind("scale.", 0) == 0) {
      const std::string name = key.substr(6);
      bool found = false;
      for (int f = 0; f < FeatureScales::kFeatureCount; ++f) {
        if (name == FeatureScales::feature_name(f)) {
          const FractionRange r = parse_range(val, key);
          s.scales.range(f) = {r.lo, r.hi};
          found = true;
        }
      }
      if (!found) throw std::runtime_error("stats file: unknown feature '" + name + "'");
    } else if (key == "normamps_table") {
      s.normamps_table = parse_list(val, key);
    } else if (key.rfind("phase.", 0) == 0) {
      s.stats.phase_fraction[key.substr(6)] = parse_range(val, key);
    } else if (key.rfind("outdeg.", 0) == 0) {
      s.stats.outdeg_fraction[key.substr(7)] = parse_range(val, key);
    } else if (key == "edges") {
      s.stats.length_hist.edges = parse_list(val, key);
    } else if (key == "fractions") {
      s.stats.length_hist.fractions = parse_list(val, key);
    } else {
      throw std::runtime_error("stats file: unknown key '" + key + "'");
    }
  }
  if (!saw_any) throw std::runtime_error("stats file: no entries found");
  if (!s.stats.length_hist.edges.empty() &&
      s.stats.length_hist.edges.size() != s.stats.length_hist.fractions.size() + 1) {
    throw std::runtime_error("stats file: histogram edges must outnumber fractions by one");
  }
  return s;
}

void write_stats_path(const std::string& path, const StatsFile& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write stats file: " + path);
  out << write_stats_text(s);
}

StatsFile read_stats_path(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open stats file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_stats_text(buf.str());
}

StatsFile stats_from_corpus(const std::vector<FeederGraph>& graphs, int bins) {
  StatsFile s;
  s.scales = FeatureScales::from_corpus(graphs);
  s.stats = EmpiricalStats::from_corpus(graphs, bins);
  std::set<double> amps;
  for (const FeederGraph& g : graphs) {
    for (const DeviceNode& n : g.nodes()) amps.insert(n.norm_amps);
  }
  s.normamps_table.assign(amps.begin(), amps.end());
  return s;
}

}  // namespace feedergen
