#include "feedergen/nn/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace feedergen::nn {

namespace {

constexpr const char* kMagic = "feedergen-checkpoint v1";

void write_matrix(std::FILE* f, const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) std::fprintf(f, "%a%c", m.at(r, c), c + 1 == m.cols() ? '\n' : ' ');
  }
  if (m.rows() == 0 || m.cols() == 0) std::fprintf(f, "\n");
}

// istream >> double does not accept hexfloat; read tokens and strtod them.
double read_value(std::istream& in, const std::string& ctx) {
  std::string tok;
  if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated values for " + ctx);
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::runtime_error("checkpoint: bad value '" + tok + "' in " + ctx);
  return v;
}

void read_matrix(std::istream& in, Matrix& m, const std::string& ctx) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m.at(r, c) = read_value(in, ctx);
}

}  // namespace

void Checkpoint::save(const std::string& path, const std::vector<const Param*>& params) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("checkpoint: cannot write " + path);
  std::fprintf(f, "%s\n", kMagic);
  for (const auto& [k, v] : meta) std::fprintf(f, "meta %s %s\n", k.c_str(), v.c_str());
  for (const Param* p : params) {
    std::fprintf(f, "param %s %d %d\n", p->name.c_str(), p->value.rows(), p->value.cols());
    write_matrix(f, p->value);
    std::fprintf(f, "rms %s %d %d\n", p->name.c_str(), p->rms.rows(), p->rms.cols());
    write_matrix(f, p->rms);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("checkpoint: write failed for " + path);
}

void Checkpoint::load(const std::string& path, const std::vector<Param*>& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error("checkpoint: bad magic in " + path);

  std::map<std::string, Param*> by_name;
  for (Param* p : params) by_name[p->name] = p;
  std::set<std::string> loaded;

  meta.clear();
  std::string word;
  while (in >> word) {
    if (word == "meta") {
      std::string key;
      in >> key;
      std::getline(in, line);
      if (!line.empty() && line.front() == ' ') line.erase(0, 1);
      meta[key] = line;
    } else if (word == "param" || word == "rms") {
      std::string name;
      int rows = 0, cols = 0;
      if (!(in >> name >> rows >> cols))
        throw std::runtime_error("checkpoint: malformed block header");
      auto it = by_name.find(name);
      if (it == by_name.end())
        throw std::runtime_error("checkpoint: unknown parameter '" + name + "'");
      Matrix& target = (word == "param") ? it->second->value : it->second->rms;
      if (target.rows() != rows || target.cols() != cols)
        throw std::runtime_error("checkpoint: shape mismatch for '" + name + "': file has " +
                                 std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", expected " + std::to_string(target.rows()) + "x" +
                                 std::to_string(target.cols()));
      read_matrix(in, target, name);
      if (word == "param") loaded.insert(name);
    } else {
      throw std::runtime_error("checkpoint: unexpected token '" + word + "'");
    }
  }
  for (const auto& [name, p] : by_name) {
    (void)p;
    if (!loaded.count(name))
      throw std::runtime_error("checkpoint: parameter '" + name + "' missing from " + path);
  }
}

}  // namespace feedergen::nn
