#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "kfrac/errors.hpp"
#include "kfrac/grid_function.hpp"

namespace kfrac {

/// Composite trapezoidal weight of node i on an n-node uniform grid.
inline double trapezoid_weight(std::size_t i, std::size_t n, double step) {
  return (i == 0 || i + 1 == n) ? 0.5 * step : step;
}

inline double trapezoid(const std::vector<double>& f, double step) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * step;
}

template <class F>
double trapezoid_over(const GridFunction& u, F&& integrand) {
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = integrand(u.node(i), u[i]);
  return trapezoid(f, u.step());
}

namespace detail {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kGkNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr std::array<double, 8> kGkWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gauss_kronrod_panel(F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double fk = kGkWeights[7] * f(c);
  double fg = kGaussWeights[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double x = r * kGkNodes[i];
    const double sum = f(c - x) + f(c + x);
    fk += kGkWeights[i] * sum;
    if (i % 2 == 1) fg += kGaussWeights[i / 2] * sum;
  }
  kronrod = fk * r;
  err = std::abs((fk - fg) * r);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
double adaptive_quadrature(F f, double a, double b, double abs_tol = 1e-12,
                           int max_depth = 40) {
  if (a == b) return 0.0;
  struct Panel {
    double a, b, tol;
    int depth;
  };
  std::vector<Panel> stack{{a, b, abs_tol, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    double val = 0.0, err = 0.0;
    detail::gauss_kronrod_panel(f, p.a, p.b, val, err);
    if (err <= p.tol || p.depth >= max_depth) {
      if (!std::isfinite(val)) throw NumericalFailure("adaptive_quadrature: non-finite panel");
      total += val;
    } else {
      const double m = 0.5 * (p.a + p.b);
      stack.push_back({p.a, m, 0.5 * p.tol, p.depth + 1});
      stack.push_back({m, p.b, 0.5 * p.tol, p.depth + 1});
    }
  }
  return total;
}

}  // namespace kfrac
