#pragma once

#include <cmath>
#include <cstddef>

#include "kfrac/grid_function.hpp"
#include "kfrac/rng.hpp"

namespace kfrac {

/// Random combination of the first kmax sine modes, so the result vanishes at
/// both endpoints. Coefficients decay like 1/k to keep samples grid-resolved.
inline GridFunction random_sine_combo(Rng& rng, double length, std::size_t n,
                                      int kmax = 8, double scale = 1.0) {
  std::vector<double> coeff(static_cast<std::size_t>(kmax));
  for (int k = 0; k < kmax; ++k) coeff[k] = scale * rng.normal() / (k + 1.0);
  const double pi = 3.14159265358979323846;
  return GridFunction::sample(length, n, [&](double t) {
    double v = 0.0;
    for (int k = 0; k < kmax; ++k) v += coeff[k] * std::sin((k + 1) * pi * t / length);
    return v;
  });
}

/// Smooth positive bump with exact zeros at the endpoints.
inline GridFunction bump(double length, std::size_t n, double center, double width) {
  const double pi = 3.14159265358979323846;
  return GridFunction::sample(length, n, [&](double t) {
    const double g = std::exp(-0.5 * ((t - center) / width) * ((t - center) / width));
    return g * std::sin(pi * t / length);
  });
}

}  // namespace kfrac
