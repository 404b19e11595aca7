#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kfrac {

/// Seeded generator with hand-rolled distributions so that identical seeds
/// reproduce identical streams on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {  // Box-Muller, cached pair
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(t);
    has_cache_ = true;
    return r * std::cos(t);
  }

  std::uint64_t integer(std::uint64_t n) {  // [0, n)
    return eng_() % n;
  }

 private:
  std::mt19937_64 eng_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

}  // namespace kfrac
