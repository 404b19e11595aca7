#include "kfrac/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kfrac/errors.hpp"
#include "kfrac/quadrature.hpp"
#include "kfrac/random_functions.hpp"

namespace kfrac {

namespace {

constexpr double kZeroTraceTol = 1e-14;

void require_zero_trace(const GridFunction& u, const char* who) {
  const double scale = std::max(1.0, u.max_abs());
  if (std::abs(u[0]) > kZeroTraceTol * scale ||
      std::abs(u[u.size() - 1]) > kZeroTraceTol * scale)
    throw PreconditionError(std::string(who) + ": boundary values must vanish");
}

std::vector<double> trapezoid_weights(std::size_t n, double step) {
  std::vector<double> w(n, step);
  w.front() = w.back() = 0.5 * step;
  return w;
}

}  // namespace

Nonlinearity Nonlinearity::power(double mu) {
  if (!(mu > 1.0)) throw DomainError("Nonlinearity::power: exponent must exceed 1");
  Nonlinearity nl;
  nl.h_ = [mu](double, double u) {
    return u == 0.0 ? 0.0 : std::pow(std::abs(u), mu - 2.0) * u;
  };
  nl.primitive_ = [mu](double, double u) { return std::pow(std::abs(u), mu) / mu; };
  nl.slope_ = [mu](double, double u) {
    return u == 0.0 ? 0.0 : (mu - 1.0) * std::pow(std::abs(u), mu - 2.0);
  };
  return nl;
}

Nonlinearity Nonlinearity::zero() {
  Nonlinearity nl;
  nl.h_ = [](double, double) { return 0.0; };
  nl.primitive_ = [](double, double) { return 0.0; };
  nl.slope_ = [](double, double) { return 0.0; };
  return nl;
}

Nonlinearity Nonlinearity::custom(Term h, Term slope) {
  Nonlinearity nl;
  nl.h_ = std::move(h);
  nl.slope_ = std::move(slope);
  return nl;
}

double Nonlinearity::primitive(double t, double u) const {
  if (primitive_) return primitive_(t, u);
  if (u == 0.0) return 0.0;
  return adaptive_quadrature([this, t](double s) { return h_(t, s); }, 0.0, u, 1e-10);
}

double Nonlinearity::slope(double t, double u) const {
  if (slope_) return slope_(t, u);
  const double e = 1e-6 * std::max(1.0, std::abs(u));
  return (h_(t, u + e) - h_(t, u - e)) / (2.0 * e);
}

BVProblem::BVProblem(KSpaceContext ctx, Nonlinearity h, double mu)
    : ctx_(std::move(ctx)), h_(std::move(h)), mu_(mu) {
  const auto xs = default_x_lattice(ctx_.length());
  const auto ts = default_t_lattice();
  k_delta2_ = delta2_constant(ctx_.mf(), xs, ts);
  if (!(mu_ > k_delta2_)) {
    std::ostringstream os;
    os << "BVProblem: superlinearity exponent " << mu_
       << " must exceed the doubling constant " << k_delta2_;
    throw InvariantViolation(os.str());
  }
  ell_ = std::numeric_limits<double>::infinity();
  for (double t : linear_lattice(0.0, ctx_.length(), 65)) {
    for (double sign : {1.0, -1.0}) {
      const double v = h_.primitive(t, sign);
      if (!std::isfinite(h_.value(t, sign)) || !std::isfinite(v))
        throw InvariantViolation("BVProblem: source term not finite on the lattice");
      ell_ = std::min(ell_, v);
    }
  }
  a_ = ctx_.hilfer_operator().dense();
  w_ = trapezoid_weights(ctx_.grid_size(), ctx_.length() /
                                               static_cast<double>(ctx_.grid_size() - 1));
}

const CholeskySolver& BVProblem::descent_metric() const {
  if (!metric_) {
    const std::size_t n = ctx_.grid_size();
    const std::size_t m = n - 2;
    DenseMatrix k(m, m);
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = w_[i];
      const double* row = a_.row(i);
      for (std::size_t aa = 0; aa < m; ++aa) {
        const double v = wi * row[aa + 1];
        if (v == 0.0) continue;
        double* kr = k.row(aa);
        for (std::size_t bb = aa; bb < m; ++bb) kr[bb] += v * row[bb + 1];
      }
    }
    for (std::size_t aa = 0; aa < m; ++aa)
      for (std::size_t bb = 0; bb < aa; ++bb) k(aa, bb) = k(bb, aa);
    try {
      metric_ = std::make_unique<CholeskySolver>(k);
    } catch (const NumericalFailure&) {
      double ridge = 0.0;
      for (std::size_t aa = 0; aa < m; ++aa) ridge = std::max(ridge, k(aa, aa));
      for (std::size_t aa = 0; aa < m; ++aa) k(aa, aa) += 1e-12 * ridge;
      metric_ = std::make_unique<CholeskySolver>(k);
    }
  }
  return *metric_;
}

CheckReport ar_condition_check(const BVProblem& prob,
                               std::span<const double> t_samples,
                               std::span<const double> u_samples) {
  CheckReport rep;
  rep.name = "ar-condition";
  rep.anchor = "h2";
  rep.pass = true;
  rep.margin = std::numeric_limits<double>::infinity();
  const double slack = 1e-10;
  for (double t : t_samples) {
    for (double u : u_samples) {
      if (u == 0.0) throw DomainError("ar_condition_check: u samples must be nonzero");
      const double goal = prob.mu() * prob.h().primitive(t, u);
      const double cap = prob.h().value(t, u) * u;
      const double margin = std::min(goal, cap - goal);
      if (margin < rep.margin) {
        rep.margin = margin;
        rep.lhs = goal;
        rep.rhs = cap;
        std::ostringstream os;
        os << "worst at t=" << t << " u=" << u;
        rep.note = os.str();
      }
      if (!(goal > 0.0) || goal > cap + slack) rep.pass = false;
    }
  }
  return rep;
}

CheckReport ar_condition_check(const BVProblem& prob) {
  const auto ts = linear_lattice(0.0, prob.length(), 21);
  std::vector<double> us;
  for (double v : log_lattice(1e-3, 1e3, 25)) {
    us.push_back(v);
    us.push_back(-v);
  }
  return ar_condition_check(prob, ts, us);
}

namespace {

struct Assembly {
  std::vector<double> gradient;  // raw pairing coefficients, boundary zeroed
  double residual_norm = 0.0;
};

Assembly assemble_gradient(const BVProblem& prob, const GridFunction& u) {
  const auto& a = prob.derivative_matrix();
  const auto& w = prob.weights();
  const std::size_t n = u.size();
  const auto du = a.multiply(u.samples());
  std::vector<double> y(n);
  const auto& mf = prob.ctx().mf();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u.node(i);
    y[i] = w[i] * mf.phi(x, du[i]);
  }
  Assembly out;
  out.gradient = a.multiply_transpose(y);
  for (std::size_t i = 0; i < n; ++i)
    out.gradient[i] -= w[i] * prob.h().value(u.node(i), u[i]);
  out.gradient.front() = 0.0;
  out.gradient.back() = 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i)
    acc += out.gradient[i] * out.gradient[i] / w[i];
  out.residual_norm = std::sqrt(acc);
  return out;
}

}  // namespace

double energy(const BVProblem& prob, const GridFunction& u) {
  require_zero_trace(u, "energy");
  const auto du = prob.derivative_matrix().multiply(u.samples());
  const auto& w = prob.weights();
  const auto& mf = prob.ctx().mf();
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u.node(i);
    e += w[i] * (mf.phi_value(x, du[i]) - prob.h().primitive(x, u[i]));
  }
  return e;
}

GridFunction residual(const BVProblem& prob, const GridFunction& u) {
  require_zero_trace(u, "residual");
  auto asm_ = assemble_gradient(prob, u);
  const auto& w = prob.weights();
  GridFunction g(u.length(), std::move(asm_.gradient));
  for (std::size_t i = 1; i + 1 < g.size(); ++i) g[i] /= w[i];
  return g;
}

double residual_norm(const BVProblem& prob, const GridFunction& u) {
  require_zero_trace(u, "residual_norm");
  return assemble_gradient(prob, u).residual_norm;
}

CheckReport lemma_growth_checks(const BVProblem& prob, Rng& rng) {
  CheckReport rep;
  rep.name = "growth-lemmas";
  rep.anchor = "lemma-4.2/4.3";
  rep.pass = true;
  rep.margin = std::numeric_limits<double>::infinity();
  const double slack = 1e-8;
  const double mu = prob.mu();
  const auto& h = prob.h();

  auto note_worst = [&rep](double margin, const std::string& what) {
    if (margin < rep.margin) {
      rep.margin = margin;
      rep.note = what;
    }
  };

  for (double t : linear_lattice(0.0, prob.length(), 17)) {
    for (double base : log_lattice(1e-3, 1e3, 25)) {
      for (double sign : {1.0, -1.0}) {
        const double u = sign * base;
        const double scaled = h.primitive(t, u / std::abs(u)) *
                              std::pow(std::abs(u), mu);
        const double plain = h.primitive(t, u);
        if (std::abs(u) <= 1.0) {
          note_worst(scaled - plain, "small-argument cap");
          if (plain > scaled + slack) rep.pass = false;
        }
        if (std::abs(u) >= 1.0) {
          note_worst(plain - scaled, "large-argument floor");
          if (plain < scaled - slack) rep.pass = false;
        }
      }
    }
  }

  // Integral lower bound under scaling, on random profiles.
  const double ell = prob.primitive_floor();
  const double length = prob.length();
  for (int trial = 0; trial < 20; ++trial) {
    auto u = random_sine_combo(rng, length, 129, 6, 1.0);
    const double s = (rng.uniform() < 0.5 ? -1.0 : 1.0) *
                     std::pow(10.0, rng.uniform(-1.0, 1.0));
    std::vector<double> hs(u.size()), um(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      hs[i] = h.primitive(u.node(i), s * u[i]);
      um[i] = std::pow(std::abs(u[i]), mu);
    }
    const double lhs = trapezoid(hs, u.step());
    const double rhs = ell * std::pow(std::abs(s), mu) * trapezoid(um, u.step()) -
                       length * ell;
    note_worst(lhs - rhs, "scaled integral floor");
    if (lhs < rhs - slack) rep.pass = false;
  }
  rep.lhs = rep.rhs = 0.0;
  return rep;
}

MountainPassGeometry geometry_check(const BVProblem& prob, std::uint64_t seed,
                                    std::size_t rim_directions) {
  const auto& ctx = prob.ctx();
  const auto c = ctx.embedding_constants();
  MountainPassGeometry geo(ctx.zeros());
  geo.sup_factor = c.sup_constant;
  geo.unit_ball_radius = 1.0 / c.sup_constant;

  double cap = 0.0;
  for (double t : linear_lattice(0.0, prob.length(), 65))
    cap = std::max({cap, prob.h().primitive(t, 1.0), prob.h().primitive(t, -1.0)});
  geo.primitive_cap = cap;

  const double pl = ctx.mf().phi_lower(), pu = ctx.mf().phi_upper();
  const double mu = prob.mu();
  const double scale = std::pow(geo.sup_factor, mu) * prob.length() * cap;
  double radius = geo.unit_ball_radius;
  if (cap > 0.0 && mu > pu)
    radius = std::min(radius, std::pow(1.0 / scale, 1.0 / (mu - pu)));
  radius *= 0.9;

  double exponent = radius >= 1.0 ? pl : pu;
  double level = std::pow(radius, exponent) - scale * std::pow(radius, mu);
  for (int tries = 0; level <= 0.0 && tries < 60; ++tries) {
    radius *= 0.5;
    exponent = radius >= 1.0 ? pl : pu;
    level = std::pow(radius, exponent) - scale * std::pow(radius, mu);
  }
  if (!(level > 0.0))
    throw GeometryFailure("geometry_check: no positive rim level found");
  geo.rim_radius = radius;
  geo.rim_level = level;
  geo.exponent = exponent;

  // Rim verification on random zero-trace directions scaled onto the sphere.
  Rng rng(seed);
  const std::size_t n = ctx.grid_size();
  for (std::size_t k = 0; k < rim_directions; ++k) {
    auto v = random_sine_combo(rng, prob.length(), n, 6, 1.0);
    const double s = seminorm(ctx, v);
    if (s == 0.0) continue;
    v *= radius / s;
    const double e = energy(prob, v);
    if (e < level - 1e-9 * (1.0 + std::abs(level))) {
      std::ostringstream os;
      os << "geometry_check: rim level violated (energy " << e << " < " << level
         << ")";
      throw GeometryFailure(os.str());
    }
  }

  // Valley point: scale a fixed profile until the energy turns negative.
  const double pi = 3.14159265358979323846;
  const double length = prob.length();
  auto profile =
      GridFunction::sample(length, n, [&](double t) { return std::sin(pi * t / length); });
  double s = 1.0;
  for (int k = 0; k < 60; ++k) {
    auto e = s * profile;
    const double val = energy(prob, e);
    if (val < 0.0 && seminorm(ctx, e) > radius) {
      geo.valley_point = e;
      geo.valley_energy = val;
      return geo;
    }
    s *= 2.0;
  }
  throw GeometryFailure(
      "geometry_check: energy never turns negative under scaling (no valley)");
}

namespace {

// Damped stationarity refinement from a near-saddle state. Newton steps on
// the interior gradient with a residual-decrease line search.
struct PolishOutcome {
  GridFunction u;
  double residual = 0.0;
  std::size_t steps = 0;
  bool ok = false;
};

PolishOutcome newton_polish(const BVProblem& prob, GridFunction u, double target,
                            std::size_t max_steps) {
  const std::size_t n = u.size();
  const std::size_t m = n - 2;
  const auto& a = prob.derivative_matrix();
  const auto& w = prob.weights();
  const auto& mf = prob.ctx().mf();
  PolishOutcome out{u, 0.0, 0, false};
  double res = assemble_gradient(prob, u).residual_norm;
  for (std::size_t step = 0; step < max_steps; ++step) {
    if (res <= 0.1 * target) break;
    auto du = a.multiply(u.samples());
    DenseMatrix hess(m, m);
    for (std::size_t i = 0; i < n; ++i) {
      const double ci = w[i] * mf.phi_slope(u.node(i), du[i]);
      if (ci == 0.0) continue;
      const double* row = a.row(i);
      for (std::size_t aa = 0; aa < m; ++aa) {
        const double v = ci * row[aa + 1];
        if (v == 0.0) continue;
        double* hr = hess.row(aa);
        for (std::size_t bb = aa; bb < m; ++bb) hr[bb] += v * row[bb + 1];
      }
    }
    for (std::size_t aa = 0; aa < m; ++aa) {
      for (std::size_t bb = 0; bb < aa; ++bb) hess(aa, bb) = hess(bb, aa);
      hess(aa, aa) -= w[aa + 1] * prob.h().slope(u.node(aa + 1), u[aa + 1]);
    }
    auto grad = assemble_gradient(prob, u).gradient;
    std::vector<double> rhs(m);
    for (std::size_t aa = 0; aa < m; ++aa) rhs[aa] = -grad[aa + 1];
    std::vector<double> dir;
    try {
      dir = LuSolver(hess).solve(rhs);
    } catch (const NumericalFailure&) {
      break;
    }
    double sigma = 1.0;
    bool accepted = false;
    while (sigma > 1e-12) {
      GridFunction trial = u;
      for (std::size_t aa = 0; aa < m; ++aa) trial[aa + 1] += sigma * dir[aa];
      const double trial_res = assemble_gradient(prob, trial).residual_norm;
      if (!std::isfinite(trial_res))
        throw NumericalFailure("mountain_pass_solve: non-finite residual in polish");
      if (trial_res <= (1.0 - 1e-4 * sigma) * res) {
        u = std::move(trial);
        res = trial_res;
        accepted = true;
        break;
      }
      sigma *= 0.5;
    }
    ++out.steps;
    if (!accepted) break;
  }
  out.u = std::move(u);
  out.residual = res;
  out.ok = res <= target;
  return out;
}

}  // namespace

MountainPassResult mountain_pass_solve(const BVProblem& prob,
                                       const MountainPassGeometry& geometry,
                                       const SolverParams& params) {
  const auto& ctx = prob.ctx();
  const std::size_t n = ctx.grid_size();
  if (params.path_points < 3)
    throw DomainError("mountain_pass_solve: need at least 3 path points");

  MountainPassResult result(ctx.zeros());
  result.theta = geometry.rim_level;
  result.rim_radius = geometry.rim_radius;

  // Discrete path from the origin to the valley point.
  std::vector<GridFunction> path;
  std::vector<double> pe;
  path.reserve(params.max_path_points);
  for (std::size_t k = 0; k < params.path_points; ++k) {
    const double f =
        static_cast<double>(k) / static_cast<double>(params.path_points - 1);
    path.push_back(f * geometry.valley_point);
    pe.push_back(energy(prob, path.back()));
  }

  const auto& w = prob.weights();
  const auto& metric = prob.descent_metric();
  std::size_t history_stride = 1;
  double best_res = std::numeric_limits<double>::infinity();
  std::size_t last_best = 0;
  bool stalled = false;

  auto record = [&](const GridFunction& u, double e, double res) {
    if (result.iterations % history_stride != 0) return;
    if (result.history.size() >= params.history_cap) {
      std::vector<IterateRecord> thin;
      thin.reserve(result.history.size() / 2 + 1);
      for (std::size_t i = 0; i < result.history.size(); i += 2)
        thin.push_back(std::move(result.history[i]));
      result.history = std::move(thin);
      history_stride *= 2;
    }
    result.history.push_back({u, e, res});
  };

  while (result.iterations < params.max_iterations) {
    ++result.iterations;

    // Locate the maximizer; endpoints are pinned.
    std::size_t kmax = 1;
    for (std::size_t k = 1; k + 1 < path.size(); ++k)
      if (pe[k] > pe[kmax]) kmax = k;

    // Bisect the adjacent segments while the crest is under-resolved: a
    // midpoint that tops both of its endpoints hides the true path maximum.
    if (path.size() < params.max_path_points) {
      for (std::size_t side = 0; side < 2; ++side) {
        const std::size_t lo = side == 0 ? kmax - 1 : kmax;
        GridFunction mid = 0.5 * (path[lo] + path[lo + 1]);
        const double em = energy(prob, mid);
        if (em > std::max(pe[lo], pe[lo + 1])) {
          path.insert(path.begin() + static_cast<std::ptrdiff_t>(lo) + 1, mid);
          pe.insert(pe.begin() + static_cast<std::ptrdiff_t>(lo) + 1, em);
          if (lo + 1 <= kmax) ++kmax;
          if (path.size() >= params.max_path_points) break;
        }
      }
      for (std::size_t k = 1; k + 1 < path.size(); ++k)
        if (pe[k] > pe[kmax]) kmax = k;
    }

    GridFunction& u = path[kmax];
    auto asm_ = assemble_gradient(prob, u);
    record(u, pe[kmax], asm_.residual_norm);

    if (asm_.residual_norm <= params.residual_tol) {
      result.u_star = u;
      result.residual_norm = asm_.residual_norm;
      result.converged = true;
      break;
    }
    if (asm_.residual_norm < 0.9 * best_res) {
      best_res = asm_.residual_norm;
      last_best = result.iterations;
    }
    stalled = result.iterations - last_best > 400;

    // Preconditioned descent direction for the maximizer.
    const std::size_t m = n - 2;
    std::vector<double> gi(m);
    for (std::size_t aa = 0; aa < m; ++aa) gi[aa] = asm_.gradient[aa + 1];
    std::vector<double> dir = metric.solve(gi);
    double slope = 0.0;
    for (std::size_t aa = 0; aa < m; ++aa) {
      dir[aa] = -dir[aa];
      slope += gi[aa] * dir[aa];
    }
    if (!(slope < 0.0)) {  // metric breakdown; fall back to the raw direction
      slope = 0.0;
      for (std::size_t aa = 0; aa < m; ++aa) {
        dir[aa] = -gi[aa] / w[aa + 1];
        slope += gi[aa] * dir[aa];
      }
    }

    double sigma = 1.0;
    bool accepted = false;
    const double e0 = pe[kmax];
    GridFunction trial = u;
    while (sigma > 1e-14) {
      for (std::size_t aa = 0; aa < m; ++aa)
        trial[aa + 1] = u[aa + 1] + sigma * dir[aa];
      const double et = energy(prob, trial);
      if (std::isnan(et))
        throw NumericalFailure("mountain_pass_solve: NaN energy in line search");
      if (et <= e0 + params.armijo_slope * sigma * slope) {
        if (et >= e0) ++result.descent_violations;
        u = trial;
        pe[kmax] = et;
        accepted = true;
        break;
      }
      sigma *= params.armijo_backtrack;
    }

    if ((!accepted || stalled) && params.newton_polish) {
      // The path stage cannot push the maximizer further; refine the
      // near-saddle state by damped stationarity steps.
      auto polish = newton_polish(prob, u, params.residual_tol,
                                  std::min<std::size_t>(
                                      60, params.max_iterations - result.iterations));
      result.iterations += polish.steps;
      record(polish.u, energy(prob, polish.u), polish.residual);
      if (polish.ok) {
        result.u_star = polish.u;
        result.residual_norm = polish.residual;
        result.converged = true;
        pe[kmax] = energy(prob, polish.u);
        path[kmax] = std::move(polish.u);
        break;
      }
      if (!accepted) {
        result.note = "line search and stationarity refinement both stalled";
        result.u_star = u;
        result.residual_norm = asm_.residual_norm;
        break;
      }
      last_best = result.iterations;  // give the path stage another window
    }
  }

  if (!result.converged && result.note.empty()) {
    std::size_t kmax = 1;
    for (std::size_t k = 1; k + 1 < path.size(); ++k)
      if (pe[k] > pe[kmax]) kmax = k;
    result.u_star = path[kmax];
    result.residual_norm = assemble_gradient(prob, result.u_star).residual_norm;
    result.note = "iteration budget exhausted";
  }

  result.energy = energy(prob, result.u_star);
  result.path_max_energy = result.energy;
  for (std::size_t k = 1; k + 1 < path.size(); ++k)
    result.path_max_energy = std::max(result.path_max_energy, pe[k]);

  if (result.converged) {
    // A converged state must sit on the mountain-pass level and be
    // nontrivial; a collapse to the origin is reported, not accepted.
    if (result.energy < result.theta - 1e-6) {
      result.converged = false;
      result.note = "stationary point below the rim level";
    } else if (k_norm(ctx, result.u_star) < 0.5 * result.rim_radius) {
      result.converged = false;
      result.note = "stationary point is trivial (norm below half the rim radius)";
    }
  }
  return result;
}

PsDiagnostic ps_diagnostic(const BVProblem& prob,
                           const std::vector<IterateRecord>& history) {
  if (history.empty())
    throw PreconditionError("ps_diagnostic: empty iterate history");
  PsDiagnostic diag;
  diag.chain_pass = true;
  const auto& ctx = prob.ctx();
  const double pl = ctx.mf().phi_lower(), pu = ctx.mf().phi_upper();
  const double factor = 1.0 - prob.doubling_constant() / prob.mu();
  for (const auto& rec : history) {
    PsIterateRow row;
    row.energy = rec.energy;
    row.residual = rec.residual;
    const double s = seminorm(ctx, rec.u);
    const double expo = s > 1.0 ? pl : pu;
    row.chain_lhs = factor * std::pow(s, expo);
    const auto grad = assemble_gradient(prob, rec.u).gradient;
    double pairing = 0.0;
    for (std::size_t i = 0; i < rec.u.size(); ++i) pairing += grad[i] * rec.u[i];
    row.chain_rhs = rec.energy - pairing / prob.mu();
    if (row.chain_rhs < row.chain_lhs - 1e-6 * (1.0 + std::abs(row.chain_rhs)))
      diag.chain_pass = false;
    diag.max_abs_energy = std::max(diag.max_abs_energy, std::abs(rec.energy));
    diag.rows.push_back(row);
  }
  diag.final_residual = diag.rows.back().residual;
  std::ostringstream os;
  os << diag.rows.size() << " iterates, max |energy| = " << diag.max_abs_energy;
  diag.note = os.str();
  return diag;
}

}  // namespace kfrac
