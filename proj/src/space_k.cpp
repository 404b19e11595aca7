#include "kfrac/space_k.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kfrac/errors.hpp"
#include "kfrac/quadrature.hpp"

namespace kfrac {

namespace {

constexpr double kUnitBand = 1e-9;      // indeterminate band around norm = 1
constexpr double kCheckSlack = 1e-6;    // slack of the proposition checks
constexpr std::size_t kTableGrid = 1537;  // largest grid kept as dense tables

void require_zero_trace(const GridFunction& u, const char* who) {
  const double scale = std::max(1.0, u.max_abs());
  if (std::abs(u[0]) > 1e-14 * scale || std::abs(u[u.size() - 1]) > 1e-14 * scale)
    throw PreconditionError(std::string(who) + ": boundary values must vanish");
}

bool leq(double lhs, double rhs) { return lhs <= rhs + kCheckSlack * (1.0 + rhs); }

}  // namespace

KSpaceContext::KSpaceContext(MusielakFunction mf, PsiWeight psi, FracParams params,
                             std::size_t grid_size, double length,
                             double pairing_factor)
    : mf_(std::move(mf)),
      psi_(std::move(psi)),
      params_(params),
      n_(grid_size),
      length_(length),
      pairing_factor_(pairing_factor) {
  if (n_ < 3) throw DomainError("KSpaceContext: need at least 3 grid nodes");
  if (!(length_ > 0.0)) throw DomainError("KSpaceContext: length must be positive");
  if (!(pairing_factor_ > 0.0))
    throw DomainError("KSpaceContext: pairing factor must be positive");
  psi_.validate(length_);
}

const HilferOperator& KSpaceContext::hilfer_operator() const {
  if (!hilfer_op_)
    hilfer_op_ = std::make_unique<HilferOperator>(psi_, params_, n_, length_);
  return *hilfer_op_;
}

GridFunction KSpaceContext::hilfer(const GridFunction& u) const {
  if (u.size() != n_) throw PreconditionError("KSpaceContext: grid size mismatch");
  if (n_ <= kTableGrid) return hilfer_operator().apply(u);
  return hilfer_left(psi_, params_, u);
}

GridFunction KSpaceContext::frac_integral(const GridFunction& u) const {
  if (u.size() != n_) throw PreconditionError("KSpaceContext: grid size mismatch");
  if (n_ <= kTableGrid) {
    if (!integral_op_)
      integral_op_ = std::make_unique<ProductIntegralOp>(
          psi_, params_.alpha(), n_, length_, ProductIntegralOp::Side::Left);
    return integral_op_->apply(u);
  }
  return frac_integral_left(psi_, params_.alpha(), u);
}

EmbeddingConstants KSpaceContext::embedding_constants() const {
  EmbeddingConstants c;
  const double alpha = params_.alpha();
  const double span = psi_.value(length_) - psi_.value(0.0);
  c.kappa = std::pow(span, alpha) / std::tgamma(alpha + 1.0);
  c.c_lower = std::pow(c.kappa, 1.0 / mf_.phi_lower());
  c.c_upper = std::pow(c.kappa, 1.0 / mf_.phi_upper());
  c.pairing_factor = pairing_factor_;
  double conj1 = 0.0;
  for (double x : default_x_lattice(length_))
    conj1 = std::max(conj1, mf_.conjugate_value(x, 1.0));
  c.conj_at_one = conj1;
  c.sup_constant = pairing_factor_ * std::pow(conj1, 1.0 / mf_.phi_upper()) *
                   std::pow(span, alpha / mf_.phi_upper()) / std::tgamma(alpha + 1.0);
  return c;
}

double seminorm(const KSpaceContext& ctx, const GridFunction& u) {
  return luxemburg_norm(ctx.mf(), ctx.hilfer(u));
}

double k_norm(const KSpaceContext& ctx, const GridFunction& u) {
  return luxemburg_norm(ctx.mf(), u) + seminorm(ctx, u);
}

KModular k_modular(const KSpaceContext& ctx, const GridFunction& u) {
  KModular m;
  m.zero_trace = modular(ctx.mf(), ctx.hilfer(u));
  m.full = modular(ctx.mf(), u) + m.zero_trace;
  return m;
}

CheckReport seminorm_modular_sandwich_check(const KSpaceContext& ctx,
                                            const GridFunction& u) {
  CheckReport rep;
  rep.name = "seminorm-modular-sandwich";
  rep.anchor = "prop-3.2";
  if (u.is_zero()) {
    rep.skipped = true;
    rep.note = "zero function";
    return rep;
  }
  GridFunction du = ctx.hilfer(u);
  const double s = luxemburg_norm(ctx.mf(), du);
  const double rho = modular(ctx.mf(), du);
  if (std::abs(s - 1.0) <= kUnitBand) {
    rep.skipped = true;
    rep.note = "seminorm on the unit sphere";
    return rep;
  }
  const double pl = ctx.mf().phi_lower(), pu = ctx.mf().phi_upper();
  const double lo = s > 1.0 ? std::pow(s, pl) : std::pow(s, pu);
  const double hi = s > 1.0 ? std::pow(s, pu) : std::pow(s, pl);
  rep.lhs = lo;
  rep.rhs = hi;
  rep.margin = std::min(rho - lo, hi - rho);
  rep.pass = leq(lo, rho) && leq(rho, hi);
  if (!rep.pass) {
    std::ostringstream os;
    os << "seminorm=" << s << " modular=" << rho;
    rep.note = os.str();
  }
  return rep;
}

CheckReport integral_bound_check(const KSpaceContext& ctx, const GridFunction& v) {
  CheckReport rep;
  rep.name = "integral-bound";
  rep.anchor = "prop-3.3";
  if (v.is_zero()) {
    rep.pass = true;
    rep.note = "zero function";
    return rep;
  }
  const auto c = ctx.embedding_constants();
  const double a = luxemburg_norm(ctx.mf(), v);
  const double b = luxemburg_norm(ctx.mf(), ctx.frac_integral(v));
  const double pl = ctx.mf().phi_lower(), pu = ctx.mf().phi_upper();
  rep.lhs = b;
  if (a > 1.0 + kUnitBand && b > 1.0 + kUnitBand) {
    rep.rhs = c.c_lower * std::pow(a, pu / pl);
  } else if (a < 1.0 - kUnitBand && b < 1.0 - kUnitBand) {
    rep.rhs = c.c_upper * std::pow(a, pl / pu);
  } else {
    rep.skipped = true;
    std::ostringstream os;
    os << "mixed norm regime (input " << a << ", image " << b << ")";
    rep.note = os.str();
    return rep;
  }
  rep.margin = rep.rhs - rep.lhs;
  rep.pass = leq(rep.lhs, rep.rhs);
  return rep;
}

CheckReport poincare_check(const KSpaceContext& ctx, const GridFunction& u) {
  require_zero_trace(u, "poincare_check");
  CheckReport rep;
  rep.name = "poincare";
  rep.anchor = "prop-3.5";
  if (u.is_zero()) {
    rep.pass = true;
    rep.note = "zero function";
    return rep;
  }
  const auto c = ctx.embedding_constants();
  const double s = seminorm(ctx, u);
  const double a = luxemburg_norm(ctx.mf(), u);
  const double pl = ctx.mf().phi_lower(), pu = ctx.mf().phi_upper();
  rep.lhs = a;
  if (s > 1.0 + kUnitBand && a > 1.0 + kUnitBand) {
    rep.rhs = c.c_lower * std::pow(s, pu / pl);
  } else if (s < 1.0 - kUnitBand && a < 1.0 - kUnitBand) {
    rep.rhs = c.c_upper * std::pow(s, pl / pu);
  } else {
    rep.skipped = true;
    std::ostringstream os;
    os << "mixed norm regime (seminorm " << s << ", norm " << a << ")";
    rep.note = os.str();
    return rep;
  }
  rep.margin = rep.rhs - rep.lhs;
  rep.pass = leq(rep.lhs, rep.rhs);
  return rep;
}

CheckReport sup_bound_check(const KSpaceContext& ctx, const GridFunction& u) {
  require_zero_trace(u, "sup_bound_check");
  CheckReport rep;
  rep.name = "sup-bound";
  rep.anchor = "IN";
  rep.lhs = u.max_abs();
  rep.rhs = ctx.embedding_constants().sup_constant * seminorm(ctx, u);
  rep.margin = rep.rhs - rep.lhs;
  rep.pass = rep.lhs <= rep.rhs + kCheckSlack;
  return rep;
}

PsiConditionReport psi_condition_check(const PsiWeight& psi, double alpha,
                                       std::size_t grid_size, double length) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw DomainError("psi_condition_check: order must lie in (0, 1)");
  PsiConditionReport rep;
  const double h = length / static_cast<double>(grid_size - 1);
  // Base points run over the interior nodes; each is paired with every later
  // node. With two nodes there are no interior base points and the report is
  // vacuous.
  for (std::size_t i = 1; i + 1 < grid_size; ++i) {
    PsiConditionRow row;
    row.t = static_cast<double>(i) * h;
    const double dpsi = psi.derivative(row.t);
    for (std::size_t j = i + 1; j < grid_size; ++j) {
      const double s = static_cast<double>(j) * h;
      ++row.pair_count;
      const double kernel = std::pow(psi.value(s) - psi.value(row.t), alpha - 1.0);
      const bool ok = dpsi > 0.0 ? kernel < 1.0 / dpsi : false;
      if (!ok) {
        ++row.violations;
        row.max_violating_separation = s - row.t;
      }
    }
    rep.total_pairs += row.pair_count;
    rep.total_violations += row.violations;
    rep.max_violating_separation =
        std::max(rep.max_violating_separation, row.max_violating_separation);
    rep.rows.push_back(row);
  }
  return rep;
}

CheckReport norm_equivalence_probe(const KSpaceContext& ctx,
                                   const std::vector<GridFunction>& samples) {
  CheckReport rep;
  rep.name = "norm-equivalence";
  rep.anchor = "remark-3.2";
  const auto c = ctx.embedding_constants();
  const double pl = ctx.mf().phi_lower(), pu = ctx.mf().phi_upper();
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  std::size_t used = 0, skipped = 0;
  bool ok = true;
  for (const auto& u : samples) {
    if (u.is_zero()) {
      ++skipped;
      continue;
    }
    require_zero_trace(u, "norm_equivalence_probe");
    const double s = seminorm(ctx, u);
    const double a = luxemburg_norm(ctx.mf(), u);
    if (s == 0.0) {
      ++skipped;
      continue;
    }
    const double ratio = (a + s) / s;
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
    if (ratio < 1.0 - kUnitBand) ok = false;
    // The admissible band follows from the zero-trace norm bound; mixed
    // regimes carry no proven band and only feed the empirical extremes.
    if (s > 1.0 + kUnitBand && a > 1.0 + kUnitBand) {
      if (!leq(ratio, 1.0 + c.c_lower * std::pow(s, pu / pl - 1.0))) ok = false;
      ++used;
    } else if (s < 1.0 - kUnitBand && a < 1.0 - kUnitBand) {
      if (!leq(ratio, 1.0 + c.c_upper * std::pow(s, pl / pu - 1.0))) ok = false;
      ++used;
    } else {
      ++skipped;
    }
  }
  if (used == 0 && ratio_max == 0.0) {
    rep.skipped = true;
    rep.note = "no usable samples";
    return rep;
  }
  rep.lhs = ratio_min;
  rep.rhs = ratio_max;
  rep.margin = ratio_min - 1.0;
  rep.pass = ok;
  std::ostringstream os;
  os << used << " bounded samples, " << skipped << " skipped";
  rep.note = os.str();
  return rep;
}

}  // namespace kfrac
