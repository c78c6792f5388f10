#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace xsda::nn {

/// Seeded generator with fixed, library-independent draw algorithms so a seed
/// pins the whole trajectory.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// [0,1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  float uniformf(float a, float b) { return a + static_cast<float>(uniform()) * (b - a); }

  /// Standard normal via a fresh Box-Muller pair per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// [0,n)
  int64_t uniform_int(int64_t n) { return static_cast<int64_t>(uniform() * static_cast<double>(n)); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int64_t i = static_cast<int64_t>(v.size()) - 1; i > 0; --i)
      std::swap(v[i], v[uniform_int(i + 1)]);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace xsda::nn
