#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace csb {

/// Seeded random source with fixed, implementation-independent draw
/// algorithms. The standard <random> distributions are not bit-stable
/// across library implementations, so uniform and normal variates are
/// generated here directly from the mt19937_64 stream. One Rng instance
/// is single-owner; it is never shared between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) {
    return static_cast<int>(uniform01() * static_cast<double>(n));
  }

  /// Standard normal variate via Box-Muller; consumes two uniform draws
  /// per pair, the spare is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t raw() { return engine_(); }

  /// Engine state round-trip, used by strategy snapshots.
  std::string serialize_state() const {
    std::ostringstream os;
    os << engine_;
    if (has_spare_) os << " 1 " << spare_;
    else os << " 0 0";
    return os.str();
  }

  void deserialize_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    int flag = 0;
    double spare = 0.0;
    is >> flag >> spare;
    has_spare_ = (flag == 1);
    spare_ = spare;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace csb
