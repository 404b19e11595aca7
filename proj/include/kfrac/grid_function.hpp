#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "kfrac/errors.hpp"

namespace kfrac {

/// A real-valued function sampled on a uniform grid over [0, T].
///
/// This is the universal value carrier of the library: modulars, norms and
/// the fractional operators all consume and produce GridFunctions. The grid
/// includes both endpoints, so step = T / (n - 1).
class GridFunction {
 public:
  GridFunction(double length, std::vector<double> samples)
      : length_(length), samples_(std::move(samples)) {
    if (!(length_ > 0.0)) throw DomainError("GridFunction: length must be positive");
    if (samples_.size() < 2) throw DomainError("GridFunction: need at least two samples");
  }

  static GridFunction zeros(double length, std::size_t n) {
    return GridFunction(length, std::vector<double>(n, 0.0));
  }

  template <class F>
  static GridFunction sample(double length, std::size_t n, F&& f) {
    if (n < 2) throw DomainError("GridFunction: need at least two samples");
    std::vector<double> v(n);
    const double h = length / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) * h);
    return GridFunction(length, std::move(v));
  }

  std::size_t size() const { return samples_.size(); }
  double length() const { return length_; }
  double step() const { return length_ / static_cast<double>(samples_.size() - 1); }
  double node(std::size_t i) const { return static_cast<double>(i) * step(); }

  double operator[](std::size_t i) const { return samples_[i]; }
  double& operator[](std::size_t i) { return samples_[i]; }

  const std::vector<double>& samples() const { return samples_; }
  std::vector<double>& samples() { return samples_; }

  bool all_finite() const {
    for (double v : samples_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_zero() const { return max_abs() == 0.0; }

  /// Keeps every other node. Requires an odd sample count so the endpoints
  /// survive; used by grid-refinement error measurements.
  GridFunction coarsened() const {
    if (samples_.size() % 2 == 0 || samples_.size() < 3)
      throw PreconditionError("GridFunction::coarsened: need odd size >= 3");
    std::vector<double> v((samples_.size() + 1) / 2);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = samples_[2 * i];
    return GridFunction(length_, std::move(v));
  }

  GridFunction& operator+=(const GridFunction& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
    return *this;
  }
  GridFunction& operator*=(double c) {
    for (double& v : samples_) v *= c;
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }
  friend GridFunction operator*(GridFunction a, double c) { return a *= c; }

  void check_same_grid(const GridFunction& o) const {
    if (o.samples_.size() != samples_.size() || o.length_ != length_)
      throw PreconditionError("GridFunction: grids do not match");
  }

 private:
  double length_;
  std::vector<double> samples_;
};

inline double sup_distance(const GridFunction& a, const GridFunction& b) {
  a.check_same_grid(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace kfrac
