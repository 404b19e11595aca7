#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kfrac/check_report.hpp"
#include "kfrac/dense_matrix.hpp"
#include "kfrac/rng.hpp"
#include "kfrac/space_k.hpp"

namespace kfrac {

/// Source term h(t, u) together with its primitive in u. The power family
/// h = |u|^(mu-2) u carries closed forms; custom terms fall back to adaptive
/// quadrature for the primitive and differences for the slope.
class Nonlinearity {
 public:
  using Term = std::function<double(double, double)>;

  static Nonlinearity power(double mu);  // ties the growth to the exponent mu
  static Nonlinearity zero();
  static Nonlinearity custom(Term h, Term slope = nullptr);

  double value(double t, double u) const { return h_(t, u); }
  double primitive(double t, double u) const;
  double slope(double t, double u) const;

 private:
  Nonlinearity() = default;
  Term h_;
  Term primitive_;  // optional closed form
  Term slope_;      // optional closed form
};

/// Assembled two-point problem: context, source term and superlinearity
/// exponent. The doubling constant of the growth function is computed here
/// and gates the exponent (mu must exceed it).
class BVProblem {
 public:
  BVProblem(KSpaceContext ctx, Nonlinearity h, double mu);

  const KSpaceContext& ctx() const { return ctx_; }
  const Nonlinearity& h() const { return h_; }
  double mu() const { return mu_; }
  double doubling_constant() const { return k_delta2_; }
  double primitive_floor() const { return ell_; }  // inf of H on |u| = 1

  std::size_t grid_size() const { return ctx_.grid_size(); }
  double length() const { return ctx_.length(); }

  const DenseMatrix& derivative_matrix() const { return a_; }
  const std::vector<double>& weights() const { return w_; }

  /// Gram matrix of the derivative over the interior nodes (symmetric
  /// positive definite); used as the descent metric.
  const CholeskySolver& descent_metric() const;

 private:
  KSpaceContext ctx_;
  Nonlinearity h_;
  double mu_;
  double k_delta2_;
  double ell_;
  DenseMatrix a_;
  std::vector<double> w_;
  mutable std::unique_ptr<CholeskySolver> metric_;
};

/// Superlinearity check: 0 < mu H(t,u) <= h(t,u) u on a lattice of (t, u)
/// samples with u != 0. Reports the worst violator.
CheckReport ar_condition_check(const BVProblem& prob,
                               std::span<const double> t_samples,
                               std::span<const double> u_samples);
CheckReport ar_condition_check(const BVProblem& prob);

/// Energy of a zero-trace grid function.
double energy(const BVProblem& prob, const GridFunction& u);

/// Weighted-inner-product representative of the energy derivative against
/// interior hat functions; zero at the boundary nodes.
GridFunction residual(const BVProblem& prob, const GridFunction& u);

/// Dual norm of the residual in the trapezoid-weighted inner product.
double residual_norm(const BVProblem& prob, const GridFunction& u);

/// Growth-versus-exponent inequalities of the primitive on a sample lattice
/// plus randomized integral lower bounds.
CheckReport lemma_growth_checks(const BVProblem& prob, Rng& rng);

struct MountainPassGeometry {
  explicit MountainPassGeometry(GridFunction valley) : valley_point(std::move(valley)) {}

  double rim_radius = 0.0;   // L
  double rim_level = 0.0;    // theta > 0
  double exponent = 0.0;     // growth exponent used at the rim
  double sup_factor = 0.0;   // R
  double unit_ball_radius = 0.0;  // C1 = 1/R
  double primitive_cap = 0.0;     // Ctilde, sup of H on |u| = 1
  GridFunction valley_point;      // e with energy(e) < 0
  double valley_energy = 0.0;
};

/// Certifies the rim/valley geometry: picks the rim radius from the
/// embedding constants, verifies the rim level on random directions and
/// scales a fixed profile until the energy turns negative. Throws
/// GeometryFailure when no valley exists (e.g. vanishing source term).
MountainPassGeometry geometry_check(const BVProblem& prob, std::uint64_t seed = 1,
                                    std::size_t rim_directions = 50);

struct SolverParams {
  std::size_t path_points = 21;
  std::size_t max_path_points = 161;
  double residual_tol = 1e-6;
  std::size_t max_iterations = 10000;
  std::uint64_t seed = 1;
  double armijo_slope = 1e-4;
  double armijo_backtrack = 0.5;
  bool newton_polish = true;     // engage a local stationarity polish on stall
  std::size_t history_cap = 512;  // stored iterates (thinned beyond this)
};

struct IterateRecord {
  GridFunction u;
  double energy = 0.0;
  double residual = 0.0;
};

struct MountainPassResult {
  explicit MountainPassResult(GridFunction u) : u_star(std::move(u)) {}

  GridFunction u_star;
  double energy = 0.0;
  double residual_norm = 0.0;
  double path_max_energy = 0.0;
  double theta = 0.0;
  double rim_radius = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t descent_violations = 0;  // accepted steps that failed to descend
  std::string note;
  std::vector<IterateRecord> history;
};

/// Path-deformation saddle search: a discrete path from 0 to the valley
/// point is deformed by moving its energy maximizer along a preconditioned
/// descent direction with a backtracking line search, bisecting path
/// segments whenever the crest is under-resolved. Converged when the
/// maximizer's residual norm falls below the tolerance and the iterate is
/// nontrivial (combined norm at least half the rim radius).
MountainPassResult mountain_pass_solve(const BVProblem& prob,
                                       const MountainPassGeometry& geometry,
                                       const SolverParams& params = {});

struct PsIterateRow {
  double energy = 0.0;
  double residual = 0.0;
  double chain_lhs = 0.0;  // (1 - k/mu) ||u||^exponent
  double chain_rhs = 0.0;  // energy - (1/mu) <derivative, u>
};

struct PsDiagnostic {
  std::vector<PsIterateRow> rows;
  double max_abs_energy = 0.0;
  double final_residual = 0.0;
  bool chain_pass = false;
  std::string note;
};

/// Compactness surrogate along the iterate history: bounded energies,
/// trending residuals and the coercivity chain at every stored iterate.
PsDiagnostic ps_diagnostic(const BVProblem& prob,
                           const std::vector<IterateRecord>& history);

}  // namespace kfrac
