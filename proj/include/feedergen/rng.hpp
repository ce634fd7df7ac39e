#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace feedergen {

// Deterministic RNG. std::mt19937_64 supplies the bit stream, but the
// distributions are rolled by hand because the standard ones are
// implementation-defined; runs must reproduce bit-for-bit anywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller. Deliberately uncached: state is exactly
  // the engine state, which keeps checkpoint/resume trivial and exact.
  double normal() {
    double u1 = uniform01();
    // Avoid log(0); the shift is below the resolution of uniform01's grid.
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  // Derive an independent stream for a sub-task (e.g. one trial of many) so
  // per-trial results do not depend on evaluation order.
  static uint64_t derive(uint64_t seed, uint64_t index) {
    // splitmix64 over the combined value
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Engine state as text (standard guarantees stream round-trip).
  std::string save_state() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }
  void load_state(const std::string& s) {
    std::istringstream is(s);
    is >> eng_;
    if (is.fail()) throw std::invalid_argument("Rng: bad saved state");
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace feedergen
