#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kfrac/check_report.hpp"
#include "kfrac/grid_function.hpp"

namespace kfrac {

enum class PhiFamily { ConstantPower, AffinePower, Custom };

/// A position-dependent growth function pair (phi_x, Phi_x).
///
/// The generator is phi_x(t) = a(x, |t|) * t, odd and strictly increasing in
/// t for every position x, and Phi_x(t) = integral of phi_x from 0 to |t|.
/// Two built-in families carry closed forms that anchor all the tests:
///
///   constant power:  a(x, s) = s^(p-2),            Phi_x(t) = |t|^p / p
///   affine power:    a(x, s) = s^(p(x)-2),         p(x) = p0 + p1 x / T
///
/// A custom kernel falls back to adaptive quadrature for Phi_x and to
/// monotone bracketing inversion for the conjugate machinery.
class MusielakFunction {
 public:
  using Kernel = std::function<double(double, double)>;  // a(x, s), s >= 0

  static MusielakFunction constant_power(double p);
  static MusielakFunction affine_power(double p0, double p1, double length);
  static MusielakFunction custom(Kernel kernel, double phi_lower, double phi_upper);

  PhiFamily family() const { return family_; }
  double phi_lower() const { return phi_lower_; }
  double phi_upper() const { return phi_upper_; }

  /// Growth exponent p(x); only meaningful for the power families.
  double exponent_at(double x) const;

  /// phi_x(t) = a(x,|t|) t. Odd in t.
  double phi(double x, double t) const;

  /// Phi_x(|t|). Closed form for the power families, quadrature otherwise.
  double phi_value(double x, double t) const;

  /// Derivative of phi_x with respect to t (closed form for the power
  /// families, central difference otherwise).
  double phi_slope(double x, double t) const;

  /// Inverse of phi_x restricted to [0, inf).
  double phi_inverse(double x, double s) const;

  /// Conjugate value: integral of phi_x^{-1} from 0 to t (t >= 0).
  double conjugate_value(double x, double t) const;

 private:
  MusielakFunction() = default;

  PhiFamily family_ = PhiFamily::Custom;
  Kernel kernel_;
  double phi_lower_ = 0.0;
  double phi_upper_ = 0.0;
  double p0_ = 0.0, p1_ = 0.0, length_ = 1.0;  // affine family parameters
};

std::vector<double> linear_lattice(double lo, double hi, std::size_t n);
std::vector<double> log_lattice(double lo, double hi, std::size_t n);

/// Default sampling lattices used when a check does not receive explicit
/// sample sets: 64 positions across [0, length] and 64 log-spaced magnitudes
/// in [1e-6, 1e6].
std::vector<double> default_x_lattice(double length);
std::vector<double> default_t_lattice();

/// Modular rho(u): trapezoidal integral of Phi_x(|u(x)|) over the domain.
double modular(const MusielakFunction& mf, const GridFunction& u);

/// Modular built from the conjugate function instead of Phi_x.
double conjugate_modular(const MusielakFunction& mf, const GridFunction& u);

/// Luxemburg norm: the infimum of lambda > 0 with rho(u / lambda) <= 1,
/// located by bisection on the strictly decreasing map lambda -> rho(u/lambda).
double luxemburg_norm(const MusielakFunction& mf, const GridFunction& u);

/// Luxemburg norm with respect to the conjugate function.
double conjugate_luxemburg_norm(const MusielakFunction& mf, const GridFunction& u);

/// Estimates (inf, sup) of t phi_x(t) / Phi_x(t) over the sample lattice and
/// validates the declared exponent bounds against the estimate. Constant
/// power families return (p, p) exactly.
std::pair<double, double> exponents(const MusielakFunction& mf,
                                    std::span<const double> x_samples,
                                    std::span<const double> t_samples);

/// Least doubling constant: sup of Phi_x(2t) / Phi_x(t) over the lattice
/// (exact 2^p for the constant power family).
double delta2_constant(const MusielakFunction& mf,
                       std::span<const double> x_samples,
                       std::span<const double> t_samples);

/// |integral of u v| <= 2 ||u|| ||v||* with the conjugate norm on the right.
CheckReport holder_check(const MusielakFunction& mf, const GridFunction& u,
                         const GridFunction& v);

/// Conjugate-of-generator bound: conj(phi_x(t)) <= phi_upper * Phi_x(t).
CheckReport young_type_check(const MusielakFunction& mf,
                             std::span<const double> x_samples,
                             std::span<const double> t_samples);

/// Two-sided bound Phi_x(s) <= s phi_x(s) <= Phi_x(2s).
CheckReport sandwich_check(const MusielakFunction& mf,
                           std::span<const double> x_samples,
                           std::span<const double> t_samples);

/// Norm/modular power relations: for ||u|| > 1,
/// ||u||^{phi_lower} <= rho(u) <= ||u||^{phi_upper}; reversed exponents for
/// ||u|| < 1. Skips with a note within 1e-9 of the unit sphere.
CheckReport modular_norm_relations_check(const MusielakFunction& mf,
                                         const GridFunction& u);

/// Midpoint-convexity probe of t -> Phi_x(sqrt(t)) over sampled triples.
CheckReport sqrt_convexity_check(const MusielakFunction& mf,
                                 std::span<const double> x_samples,
                                 std::span<const double> t_samples);

}  // namespace kfrac
