#include "kfrac/frac_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kfrac/errors.hpp"

namespace kfrac {

namespace {

// Exact moments of the kernel r^(alpha-1) against a linear interpolant on one
// cell. For the left-sided operator at evaluation point S and a cell
// [s_j, s_j1] with S >= s_j1 >= s_j, put d0 = S - s_j >= d1 = S - s_j1:
//
//   m0 = integral of (S - s)^(alpha-1) ds           = (d0^a - d1^a) / a
//   m1 = integral of (S - s)^(alpha-1) (s - s_j) ds = d0 m0 - (d0^(a+1) - d1^(a+1))/(a+1)
//
// The interpolant v(s) = v_j + (v_j1 - v_j)(s - s_j)/w then contributes
// v_j (m0 - m1/w) + v_j1 (m1/w). Everything stays finite for alpha in (0, 1]
// including the singular cell d1 = 0.
struct CellMoments {
  double c0, c1;  // weights of v_j and v_j1
};

CellMoments left_cell(double d0, double d1, double w, double alpha) {
  const double m0 = (std::pow(d0, alpha) - std::pow(d1, alpha)) / alpha;
  const double m1 =
      d0 * m0 - (std::pow(d0, alpha + 1.0) - std::pow(d1, alpha + 1.0)) / (alpha + 1.0);
  return {m0 - m1 / w, m1 / w};
}

CellMoments right_cell(double e0, double e1, double w, double alpha) {
  const double m0 = (std::pow(e1, alpha) - std::pow(e0, alpha)) / alpha;
  const double m1 =
      (std::pow(e1, alpha + 1.0) - std::pow(e0, alpha + 1.0)) / (alpha + 1.0) - e0 * m0;
  return {m0 - m1 / w, m1 / w};
}

std::vector<double> psi_nodes(const PsiWeight& psi, std::size_t n, double length) {
  std::vector<double> s(n);
  const double h = length / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) s[i] = psi.value(static_cast<double>(i) * h);
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(s[i + 1] > s[i]))
      throw InvariantViolation("psi is not strictly increasing on the grid");
  return s;
}

void require_integral_order(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw DomainError("fractional integral: order must lie in (0, 1]");
}

void require_derivative_order(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw DomainError("fractional derivative: order must lie in (0, 1)");
}

}  // namespace

PsiWeight PsiWeight::linear() {
  PsiWeight p;
  p.family_ = PsiFamily::Linear;
  p.psi_ = [](double t) { return t; };
  p.dpsi_ = [](double) { return 1.0; };
  return p;
}

PsiWeight PsiWeight::exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("PsiWeight::exponential: rate must be positive");
  PsiWeight p;
  p.family_ = PsiFamily::Exponential;
  p.psi_ = [rate](double t) { return std::exp(rate * t); };
  p.dpsi_ = [rate](double t) { return rate * std::exp(rate * t); };
  return p;
}

PsiWeight PsiWeight::power(double gamma) {
  if (!(gamma >= 1.0)) throw DomainError("PsiWeight::power: exponent must be >= 1");
  PsiWeight p;
  p.family_ = PsiFamily::Power;
  p.psi_ = [gamma](double t) { return std::pow(t, gamma); };
  p.dpsi_ = [gamma](double t) {
    return t == 0.0 && gamma > 1.0 ? 0.0 : gamma * std::pow(t, gamma - 1.0);
  };
  return p;
}

PsiWeight PsiWeight::custom(Map psi, Map dpsi) {
  PsiWeight p;
  p.family_ = PsiFamily::Custom;
  p.psi_ = std::move(psi);
  p.dpsi_ = std::move(dpsi);
  return p;
}

void PsiWeight::validate(double length, std::size_t samples) const {
  if (!(length > 0.0)) throw DomainError("PsiWeight::validate: bad length");
  const double h = length / static_cast<double>(samples - 1);
  double prev = psi_(0.0);
  for (std::size_t i = 1; i < samples; ++i) {
    const double t = static_cast<double>(i) * h;
    const double cur = psi_(t);
    if (!(cur > prev))
      throw InvariantViolation("PsiWeight: sampled values are not strictly increasing");
    prev = cur;
    if (i + 1 < samples && !(dpsi_(t) > 0.0))
      throw InvariantViolation("PsiWeight: derivative not positive at interior sample");
  }
  // Fourth-order difference comparison at interior samples.
  const double e = 1e-5 * std::max(1.0, length);
  for (std::size_t i = 1; i + 1 < samples; ++i) {
    const double t = static_cast<double>(i) * h;
    if (t - 2.0 * e < 0.0 || t + 2.0 * e > length) continue;
    const double fd = (-psi_(t + 2.0 * e) + 8.0 * psi_(t + e) - 8.0 * psi_(t - e) +
                       psi_(t - 2.0 * e)) /
                      (12.0 * e);
    const double d = dpsi_(t);
    if (std::abs(fd - d) > 1e-6 * std::max(1.0, std::abs(d))) {
      std::ostringstream os;
      os << "PsiWeight: derivative mismatch at t=" << t << " (" << d << " vs " << fd
         << ")";
      throw InvariantViolation(os.str());
    }
  }
}

FracParams::FracParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw DomainError("FracParams: alpha must lie in (0, 1)");
  if (!(beta >= 0.0) || !(beta <= 1.0))
    throw DomainError("FracParams: beta must lie in [0, 1]");
}

GridFunction frac_integral_left(const PsiWeight& psi, double alpha,
                                const GridFunction& v) {
  require_integral_order(alpha);
  const std::size_t n = v.size();
  const auto s = psi_nodes(psi, n, v.length());
  const double inv_gamma = 1.0 / std::tgamma(alpha);
  GridFunction out = GridFunction::zeros(v.length(), n);
  for (std::size_t i = 1; i < n; ++i) {
    const double big = s[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double w = s[j + 1] - s[j];
      const auto cm = left_cell(big - s[j], big - s[j + 1], w, alpha);
      acc += cm.c0 * v[j] + cm.c1 * v[j + 1];
    }
    out[i] = acc * inv_gamma;
  }
  return out;
}

GridFunction frac_integral_right(const PsiWeight& psi, double alpha,
                                 const GridFunction& v) {
  require_integral_order(alpha);
  const std::size_t n = v.size();
  const auto s = psi_nodes(psi, n, v.length());
  const double inv_gamma = 1.0 / std::tgamma(alpha);
  GridFunction out = GridFunction::zeros(v.length(), n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double base = s[i];
    double acc = 0.0;
    for (std::size_t j = i; j + 1 < n; ++j) {
      const double w = s[j + 1] - s[j];
      const auto cm = right_cell(s[j] - base, s[j + 1] - base, w, alpha);
      acc += cm.c0 * v[j] + cm.c1 * v[j + 1];
    }
    out[i] = acc * inv_gamma;
  }
  return out;
}

GridFunction psi_scaled_derivative(const PsiWeight& psi, const GridFunction& v) {
  const std::size_t n = v.size();
  if (n < 3) throw PreconditionError("psi_scaled_derivative: need at least 3 nodes");
  const double h = v.step();
  GridFunction out = GridFunction::zeros(v.length(), n);
  auto scale = [&psi, &v](std::size_t i, double num) {
    const double d = psi.derivative(v.node(i));
    return d == 0.0 ? 0.0 : num / d;
  };
  out[0] = scale(0, (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h));
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = scale(i, (v[i + 1] - v[i - 1]) / (2.0 * h));
  out[n - 1] = scale(n - 1, (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h));
  return out;
}

GridFunction psi_scaled_derivative_reversed(const PsiWeight& psi,
                                            const GridFunction& v) {
  GridFunction out = psi_scaled_derivative(psi, v);
  out *= -1.0;
  return out;
}

GridFunction rl_derivative_left(const PsiWeight& psi, double alpha,
                                const GridFunction& v) {
  require_derivative_order(alpha);
  GridFunction w = frac_integral_left(psi, 1.0 - alpha, v);
  GridFunction out = psi_scaled_derivative(psi, w);
  out[0] = 0.0;  // continuity convention at the base point
  return out;
}

GridFunction rl_derivative_right(const PsiWeight& psi, double alpha,
                                 const GridFunction& v) {
  require_derivative_order(alpha);
  GridFunction w = frac_integral_right(psi, 1.0 - alpha, v);
  GridFunction out = psi_scaled_derivative_reversed(psi, w);
  out[out.size() - 1] = 0.0;
  return out;
}

GridFunction hilfer_left(const PsiWeight& psi, const FracParams& params,
                         const GridFunction& v) {
  const double eta = params.eta();
  GridFunction inner = (params.beta() == 1.0)
                           ? psi_scaled_derivative(psi, v)
                           : rl_derivative_left(psi, eta, v);
  if (params.beta() == 0.0) return inner;  // outer integral of order 0
  return frac_integral_left(psi, eta - params.alpha(), inner);
}

GridFunction hilfer_right(const PsiWeight& psi, const FracParams& params,
                          const GridFunction& v) {
  const double eta = params.eta();
  GridFunction inner = (params.beta() == 1.0)
                           ? psi_scaled_derivative_reversed(psi, v)
                           : rl_derivative_right(psi, eta, v);
  if (params.beta() == 0.0) return inner;
  return frac_integral_right(psi, eta - params.alpha(), inner);
}

FtcReport ftc_compose_check(const PsiWeight& psi, const FracParams& params,
                            const GridFunction& v) {
  if (std::abs(v[0]) > 1e-14 * std::max(1.0, v.max_abs()))
    throw PreconditionError("ftc_compose_check: v must vanish at the base point");

  auto discrepancy_on = [&](const GridFunction& w) {
    GridFunction rec = frac_integral_left(psi, params.alpha(), hilfer_left(psi, params, w));
    return sup_distance(rec, w);
  };

  FtcReport rep;
  rep.discrepancy = discrepancy_on(v);
  if (v.size() % 2 == 1 && v.size() >= 5) {
    rep.coarse_discrepancy = discrepancy_on(v.coarsened());
    if (rep.discrepancy > 0.0 && rep.coarse_discrepancy > 0.0)
      rep.order = std::log2(rep.coarse_discrepancy / rep.discrepancy);
  }
  if (rep.discrepancy <= 1e-12) {
    rep.pass = true;
    rep.note = "discrepancy at round-off";
  } else if (rep.coarse_discrepancy == 0.0) {
    rep.pass = false;
    rep.note = "no refinement data (need odd grid size >= 5)";
  } else {
    rep.pass = rep.order >= 0.8;
  }
  return rep;
}

ProductIntegralOp::ProductIntegralOp(const PsiWeight& psi, double alpha, std::size_t n,
                                     double length, Side side)
    : table_(n, n), length_(length) {
  require_integral_order(alpha);
  const auto s = psi_nodes(psi, n, length);
  const double inv_gamma = 1.0 / std::tgamma(alpha);
  if (side == Side::Left) {
    for (std::size_t i = 1; i < n; ++i) {
      double* r = table_.row(i);
      const double big = s[i];
      for (std::size_t j = 0; j < i; ++j) {
        const double w = s[j + 1] - s[j];
        const auto cm = left_cell(big - s[j], big - s[j + 1], w, alpha);
        r[j] += cm.c0 * inv_gamma;
        r[j + 1] += cm.c1 * inv_gamma;
      }
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double* r = table_.row(i);
      const double base = s[i];
      for (std::size_t j = i; j + 1 < n; ++j) {
        const double w = s[j + 1] - s[j];
        const auto cm = right_cell(s[j] - base, s[j + 1] - base, w, alpha);
        r[j] += cm.c0 * inv_gamma;
        r[j + 1] += cm.c1 * inv_gamma;
      }
    }
  }
}

GridFunction ProductIntegralOp::apply(const GridFunction& v) const {
  if (v.size() != table_.rows())
    throw PreconditionError("ProductIntegralOp: grid size mismatch");
  return GridFunction(length_, table_.multiply(v.samples()));
}

DenseMatrix psi_derivative_matrix(const PsiWeight& psi, std::size_t n, double length) {
  if (n < 3) throw PreconditionError("psi_derivative_matrix: need at least 3 nodes");
  DenseMatrix m(n, n);
  const double h = length / static_cast<double>(n - 1);
  auto inv_dpsi = [&](std::size_t i) {
    const double d = psi.derivative(static_cast<double>(i) * h);
    return d == 0.0 ? 0.0 : 1.0 / d;
  };
  {
    const double c = inv_dpsi(0) / (2.0 * h);
    m(0, 0) = -3.0 * c;
    m(0, 1) = 4.0 * c;
    m(0, 2) = -c;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double c = inv_dpsi(i) / (2.0 * h);
    m(i, i - 1) = -c;
    m(i, i + 1) = c;
  }
  {
    const double c = inv_dpsi(n - 1) / (2.0 * h);
    m(n - 1, n - 1) = 3.0 * c;
    m(n - 1, n - 2) = -4.0 * c;
    m(n - 1, n - 3) = c;
  }
  return m;
}

HilferOperator::HilferOperator(const PsiWeight& psi, const FracParams& params,
                               std::size_t n, double length)
    : n_(n), length_(length) {
  const double eta = params.eta();
  derivative_rows_ = psi_derivative_matrix(psi, n, length);
  if (params.beta() == 1.0) {
    // classical inner derivative; nothing pinned at the base point
  } else {
    inner_ = std::make_unique<ProductIntegralOp>(psi, 1.0 - eta, n, length,
                                                 ProductIntegralOp::Side::Left);
    for (std::size_t j = 0; j < n; ++j) derivative_rows_(0, j) = 0.0;
  }
  if (params.beta() != 0.0) {
    outer_ = std::make_unique<ProductIntegralOp>(psi, eta - params.alpha(), n, length,
                                                 ProductIntegralOp::Side::Left);
  }
}

GridFunction HilferOperator::apply(const GridFunction& v) const {
  if (v.size() != n_) throw PreconditionError("HilferOperator: grid size mismatch");
  std::vector<double> stage = v.samples();
  if (inner_) stage = inner_->table().multiply(stage);
  stage = derivative_rows_.multiply(stage);
  if (outer_) stage = outer_->table().multiply(stage);
  return GridFunction(length_, std::move(stage));
}

const DenseMatrix& HilferOperator::dense() const {
  if (!dense_) {
    DenseMatrix m = derivative_rows_;
    if (inner_) m = DenseMatrix::product(derivative_rows_, inner_->table());
    if (outer_) m = DenseMatrix::product(outer_->table(), m);
    dense_ = std::make_unique<DenseMatrix>(std::move(m));
  }
  return *dense_;
}

}  // namespace kfrac
