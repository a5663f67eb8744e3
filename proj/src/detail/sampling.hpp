#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace randopt::detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator whose output sequence is fixed by the standard
/// (mt19937_64) and converted to reals without the implementation-defined
/// standard distributions, so samples are identical on every platform.
class Sampler {
 public:
  Sampler(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ splitmix64(stream))) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform direction on the unit sphere in R^n.
  std::vector<double> direction(std::size_t n) {
    std::vector<double> d(n);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : d) {
        v = normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& v : d) v /= norm;
    return d;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace randopt::detail
