#include "kfrac/musielak.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kfrac/errors.hpp"
#include "kfrac/quadrature.hpp"

namespace kfrac {

namespace {

constexpr double kModularResidualTol = 1e-10;  // |rho(u/lambda) - 1| target
constexpr double kBracketRelTol = 1e-12;       // relative bracket width floor
constexpr double kUnitSphereBand = 1e-9;       // skip band around ||u|| = 1

std::string format_sample(double x, double t) {
  std::ostringstream os;
  os << "x=" << x << " t=" << t;
  return os.str();
}

}  // namespace

MusielakFunction MusielakFunction::constant_power(double p) {
  if (!(p > 1.0)) throw DomainError("constant_power: exponent must exceed 1");
  MusielakFunction mf;
  mf.family_ = PhiFamily::ConstantPower;
  mf.phi_lower_ = p;
  mf.phi_upper_ = p;
  mf.p0_ = p;
  mf.p1_ = 0.0;
  mf.kernel_ = [p](double, double s) { return s == 0.0 ? 0.0 : std::pow(s, p - 2.0); };
  return mf;
}

MusielakFunction MusielakFunction::affine_power(double p0, double p1, double length) {
  if (!(length > 0.0)) throw DomainError("affine_power: length must be positive");
  const double pa = p0;
  const double pb = p0 + p1;
  if (!(std::min(pa, pb) > 1.0)) throw DomainError("affine_power: exponents must exceed 1");
  MusielakFunction mf;
  mf.family_ = PhiFamily::AffinePower;
  mf.phi_lower_ = std::min(pa, pb);
  mf.phi_upper_ = std::max(pa, pb);
  mf.p0_ = p0;
  mf.p1_ = p1;
  mf.length_ = length;
  mf.kernel_ = [p0, p1, length](double x, double s) {
    const double p = p0 + p1 * x / length;
    return s == 0.0 ? 0.0 : std::pow(s, p - 2.0);
  };
  return mf;
}

MusielakFunction MusielakFunction::custom(Kernel kernel, double phi_lower,
                                          double phi_upper) {
  if (!(phi_lower > 1.0) || !(phi_upper >= phi_lower))
    throw DomainError("custom: need 1 < phi_lower <= phi_upper");
  MusielakFunction mf;
  mf.family_ = PhiFamily::Custom;
  mf.kernel_ = std::move(kernel);
  mf.phi_lower_ = phi_lower;
  mf.phi_upper_ = phi_upper;
  return mf;
}

double MusielakFunction::exponent_at(double x) const {
  switch (family_) {
    case PhiFamily::ConstantPower:
      return p0_;
    case PhiFamily::AffinePower:
      return p0_ + p1_ * x / length_;
    case PhiFamily::Custom:
      throw DomainError("exponent_at: custom family has no pointwise exponent");
  }
  return 0.0;
}

double MusielakFunction::phi(double x, double t) const {
  if (!std::isfinite(t)) throw DomainError("phi: non-finite argument");
  if (t == 0.0) return 0.0;
  return kernel_(x, std::abs(t)) * t;
}

double MusielakFunction::phi_value(double x, double t) const {
  if (!std::isfinite(t)) throw DomainError("phi_value: non-finite argument");
  const double a = std::abs(t);
  if (a == 0.0) return 0.0;
  if (family_ != PhiFamily::Custom) {
    const double p = exponent_at(x);
    return std::pow(a, p) / p;
  }
  const double tol = 1e-13 * std::max(1.0, a * std::abs(phi(x, a)));
  return adaptive_quadrature([this, x](double s) { return phi(x, s); }, 0.0, a, tol);
}

double MusielakFunction::phi_slope(double x, double t) const {
  if (!std::isfinite(t)) throw DomainError("phi_slope: non-finite argument");
  if (family_ != PhiFamily::Custom) {
    const double p = exponent_at(x);
    const double a = std::abs(t);
    if (a == 0.0) {
      if (p == 2.0) return 1.0;
      // Degenerate (p > 2) or singular (p < 2) at the origin; clamp the
      // singular case so assembled Hessians stay finite.
      return p > 2.0 ? 0.0 : 1e12;
    }
    return (p - 1.0) * std::pow(a, p - 2.0);
  }
  const double e = 1e-6 * std::max(1.0, std::abs(t));
  return (phi(x, t + e) - phi(x, t - e)) / (2.0 * e);
}

double MusielakFunction::phi_inverse(double x, double s) const {
  if (s < 0.0) throw DomainError("phi_inverse: negative argument");
  if (s == 0.0) return 0.0;
  if (family_ != PhiFamily::Custom) {
    const double p = exponent_at(x);
    return std::pow(s, 1.0 / (p - 1.0));
  }
  // Bracket [0, hi] grown geometrically; phi_x is strictly increasing onto
  // the positive axis, so a bracket always exists.
  double hi = 1.0;
  int guard = 0;
  while (phi(x, hi) < s) {
    hi *= 2.0;
    if (++guard > 2000) throw NumericalFailure("phi_inverse: bracket growth failed");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (phi(x, mid) < s)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double MusielakFunction::conjugate_value(double x, double t) const {
  if (t < 0.0) throw DomainError("conjugate_value: negative argument");
  if (t == 0.0) return 0.0;
  if (family_ != PhiFamily::Custom) {
    const double p = exponent_at(x);
    const double q = p / (p - 1.0);
    return std::pow(t, q) / q;
  }
  const double tol = 1e-13 * std::max(1.0, t * phi_inverse(x, t));
  return adaptive_quadrature([this, x](double s) { return phi_inverse(x, s); }, 0.0, t,
                             tol);
}

std::vector<double> linear_lattice(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<double> log_lattice(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("log_lattice: need 0 < lo < hi");
  std::vector<double> v(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

std::vector<double> default_x_lattice(double length) {
  return linear_lattice(0.0, length, 64);
}

std::vector<double> default_t_lattice() { return log_lattice(1e-6, 1e6, 64); }

double modular(const MusielakFunction& mf, const GridFunction& u) {
  if (!u.all_finite()) throw DomainError("modular: non-finite samples");
  return trapezoid_over(u, [&mf](double x, double v) { return mf.phi_value(x, v); });
}

double conjugate_modular(const MusielakFunction& mf, const GridFunction& u) {
  if (!u.all_finite()) throw DomainError("conjugate_modular: non-finite samples");
  return trapezoid_over(
      u, [&mf](double x, double v) { return mf.conjugate_value(x, std::abs(v)); });
}

namespace {

// Shared bisection core for Luxemburg-type norms. rho_at(lambda) must be
// strictly decreasing in lambda whenever the function is not identically 0.
double luxemburg_from_modular(const std::function<double(double)>& rho_at) {
  double lambda = 1.0;
  double r = rho_at(lambda);
  if (std::isnan(r)) throw NumericalFailure("luxemburg: modular evaluated to NaN");
  double lo, hi;
  if (r > 1.0) {
    do {
      lo = lambda;
      lambda *= 2.0;
      if (lambda > 1e300) throw NumericalFailure("luxemburg: bracket overflow");
      r = rho_at(lambda);
    } while (r > 1.0);
    hi = lambda;
  } else {
    if (std::abs(r - 1.0) <= kModularResidualTol) return lambda;
    do {
      hi = lambda;
      lambda *= 0.5;
      if (lambda < 1e-300) return 0.0;
      r = rho_at(lambda);
    } while (r <= 1.0);
    lo = lambda;
  }
  while (hi - lo > kBracketRelTol * hi) {
    const double mid = 0.5 * (lo + hi);
    r = rho_at(mid);
    if (std::isnan(r)) throw NumericalFailure("luxemburg: modular evaluated to NaN");
    if (std::abs(r - 1.0) <= kModularResidualTol) return mid;
    if (r > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double luxemburg_norm(const MusielakFunction& mf, const GridFunction& u) {
  if (!u.all_finite()) throw DomainError("luxemburg_norm: non-finite samples");
  if (u.is_zero()) return 0.0;
  GridFunction scaled = u;
  return luxemburg_from_modular([&](double lambda) {
    for (std::size_t i = 0; i < u.size(); ++i) scaled[i] = u[i] / lambda;
    return modular(mf, scaled);
  });
}

double conjugate_luxemburg_norm(const MusielakFunction& mf, const GridFunction& u) {
  if (!u.all_finite()) throw DomainError("conjugate_luxemburg_norm: non-finite samples");
  if (u.is_zero()) return 0.0;
  GridFunction scaled = u;
  return luxemburg_from_modular([&](double lambda) {
    for (std::size_t i = 0; i < u.size(); ++i) scaled[i] = u[i] / lambda;
    return conjugate_modular(mf, scaled);
  });
}

std::pair<double, double> exponents(const MusielakFunction& mf,
                                    std::span<const double> x_samples,
                                    std::span<const double> t_samples) {
  if (x_samples.empty() || t_samples.empty())
    throw DomainError("exponents: empty sample set");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  if (mf.family() == PhiFamily::ConstantPower) {
    lo = hi = mf.exponent_at(0.0);
  } else {
    for (double x : x_samples) {
      for (double t : t_samples) {
        if (!(t > 0.0)) throw DomainError("exponents: t samples must be positive");
        const double big = mf.phi_value(x, t);
        if (!(big > 0.0))
          throw InvariantViolation("exponents: Phi_x(t) = 0 at positive t, " +
                                   format_sample(x, t));
        const double ratio = t * mf.phi(x, t) / big;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
  }
  const double slack = 1e-9 * std::max(1.0, hi);
  if (lo < mf.phi_lower() - slack || hi > mf.phi_upper() + slack) {
    std::ostringstream os;
    os << "exponents: sampled range [" << lo << ", " << hi
       << "] escapes declared bounds [" << mf.phi_lower() << ", " << mf.phi_upper()
       << "]";
    throw InvariantViolation(os.str());
  }
  return {lo, hi};
}

double delta2_constant(const MusielakFunction& mf, std::span<const double> x_samples,
                       std::span<const double> t_samples) {
  if (mf.family() == PhiFamily::ConstantPower)
    return std::pow(2.0, mf.exponent_at(0.0));
  double k = 0.0;
  for (double x : x_samples) {
    for (double t : t_samples) {
      if (!(t > 0.0)) throw DomainError("delta2_constant: t samples must be positive");
      const double denom = mf.phi_value(x, t);
      if (denom > 0.0) k = std::max(k, mf.phi_value(x, 2.0 * t) / denom);
    }
  }
  return k;
}

CheckReport holder_check(const MusielakFunction& mf, const GridFunction& u,
                         const GridFunction& v) {
  u.check_same_grid(v);
  CheckReport rep;
  rep.name = "holder";
  rep.anchor = "HOLDER";
  std::vector<double> prod(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) prod[i] = u[i] * v[i];
  rep.lhs = std::abs(trapezoid(prod, u.step()));
  rep.rhs = 2.0 * luxemburg_norm(mf, u) * conjugate_luxemburg_norm(mf, v);
  rep.margin = rep.rhs - rep.lhs;
  rep.pass = rep.lhs <= rep.rhs + 1e-8 * (1.0 + rep.rhs);
  return rep;
}

CheckReport young_type_check(const MusielakFunction& mf,
                             std::span<const double> x_samples,
                             std::span<const double> t_samples) {
  CheckReport rep;
  rep.name = "young-type";
  rep.anchor = "young";
  rep.pass = true;
  rep.margin = std::numeric_limits<double>::infinity();
  for (double x : x_samples) {
    for (double t : t_samples) {
      if (t < 0.0) throw DomainError("young_type_check: t samples must be >= 0");
      const double lhs = mf.conjugate_value(x, mf.phi(x, t));
      const double rhs = mf.phi_upper() * mf.phi_value(x, t);
      const double margin = rhs - lhs;
      if (margin < rep.margin) {
        rep.margin = margin;
        rep.lhs = lhs;
        rep.rhs = rhs;
        if (lhs > rhs + 1e-8 * (1.0 + std::abs(rhs))) {
          rep.pass = false;
          rep.note = "worst at " + format_sample(x, t);
        }
      }
    }
  }
  return rep;
}

CheckReport sandwich_check(const MusielakFunction& mf,
                           std::span<const double> x_samples,
                           std::span<const double> t_samples) {
  CheckReport rep;
  rep.name = "sandwich";
  rep.anchor = "S";
  rep.pass = true;
  rep.margin = std::numeric_limits<double>::infinity();
  for (double x : x_samples) {
    for (double s : t_samples) {
      if (s < 0.0) throw DomainError("sandwich_check: samples must be >= 0");
      const double left = mf.phi_value(x, s);
      const double mid = s * mf.phi(x, s);
      const double right = mf.phi_value(x, 2.0 * s);
      const double m = std::min(mid - left, right - mid);
      if (m < rep.margin) {
        rep.margin = m;
        rep.lhs = left;
        rep.rhs = right;
        if (left > mid + 1e-10 || mid > right + 1e-10) {
          rep.pass = false;
          rep.note = "worst at " + format_sample(x, s);
        }
      }
    }
  }
  return rep;
}

CheckReport modular_norm_relations_check(const MusielakFunction& mf,
                                         const GridFunction& u) {
  CheckReport rep;
  rep.name = "modular-norm-relations";
  rep.anchor = "prop-2.1";
  if (u.is_zero()) {
    rep.skipped = true;
    rep.note = "zero function";
    return rep;
  }
  const double norm = luxemburg_norm(mf, u);
  const double rho = modular(mf, u);
  if (std::abs(norm - 1.0) <= kUnitSphereBand) {
    rep.skipped = true;
    rep.note = "norm on the unit sphere";
    return rep;
  }
  double lo, hi;
  if (norm > 1.0) {
    lo = std::pow(norm, mf.phi_lower());
    hi = std::pow(norm, mf.phi_upper());
  } else {
    lo = std::pow(norm, mf.phi_upper());
    hi = std::pow(norm, mf.phi_lower());
  }
  rep.lhs = lo;
  rep.rhs = hi;
  rep.margin = std::min(rho - lo, hi - rho);
  const double slack = 1e-8 * (1.0 + std::abs(rho));
  rep.pass = (lo <= rho + slack) && (rho <= hi + slack);
  if (!rep.pass) rep.note = "rho=" + std::to_string(rho);
  return rep;
}

CheckReport sqrt_convexity_check(const MusielakFunction& mf,
                                 std::span<const double> x_samples,
                                 std::span<const double> t_samples) {
  CheckReport rep;
  rep.name = "sqrt-convexity";
  rep.anchor = "convex";
  rep.pass = true;
  rep.margin = std::numeric_limits<double>::infinity();
  for (double x : x_samples) {
    for (std::size_t i = 0; i + 1 < t_samples.size(); ++i) {
      const double a = t_samples[i], b = t_samples[i + 1];
      if (a < 0.0) throw DomainError("sqrt_convexity_check: samples must be >= 0");
      const double fa = mf.phi_value(x, std::sqrt(a));
      const double fb = mf.phi_value(x, std::sqrt(b));
      const double fm = mf.phi_value(x, std::sqrt(0.5 * (a + b)));
      const double margin = 0.5 * (fa + fb) - fm;
      if (margin < rep.margin) {
        rep.margin = margin;
        rep.lhs = fm;
        rep.rhs = 0.5 * (fa + fb);
        if (margin < -1e-10 * (1.0 + std::abs(fm))) {
          rep.pass = false;
          rep.note = "midpoint convexity fails near " + format_sample(x, a);
        }
      }
    }
  }
  return rep;
}

}  // namespace kfrac
