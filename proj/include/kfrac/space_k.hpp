#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kfrac/check_report.hpp"
#include "kfrac/frac_calculus.hpp"
#include "kfrac/grid_function.hpp"
#include "kfrac/musielak.hpp"

namespace kfrac {

/// Constants entering the integral/embedding bounds. All are derived from the
/// growth function, the weight and the order; the pairing factor is the
/// configurable constant of the duality inequality (default 2).
struct EmbeddingConstants {
  double kappa = 0.0;        // (psi(T) - psi(0))^alpha / Gamma(alpha + 1)
  double c_lower = 0.0;      // kappa^(1 / phi_lower)
  double c_upper = 0.0;      // kappa^(1 / phi_upper)
  double conj_at_one = 0.0;  // sup over positions of the conjugate at 1
  double pairing_factor = 2.0;
  double sup_constant = 0.0;  // uniform-norm bound per unit seminorm
};

/// Bundles the growth function, weight, fractional orders and grid into one
/// immutable evaluation context for the derivative-space machinery.
class KSpaceContext {
 public:
  KSpaceContext(MusielakFunction mf, PsiWeight psi, FracParams params,
                std::size_t grid_size, double length, double pairing_factor = 2.0);

  // Copies share the configuration but rebuild operator tables on demand.
  KSpaceContext(const KSpaceContext& o)
      : mf_(o.mf_),
        psi_(o.psi_),
        params_(o.params_),
        n_(o.n_),
        length_(o.length_),
        pairing_factor_(o.pairing_factor_) {}
  KSpaceContext(KSpaceContext&&) = default;
  KSpaceContext& operator=(const KSpaceContext&) = delete;
  KSpaceContext& operator=(KSpaceContext&&) = default;

  const MusielakFunction& mf() const { return mf_; }
  const PsiWeight& psi() const { return psi_; }
  const FracParams& params() const { return params_; }
  std::size_t grid_size() const { return n_; }
  double length() const { return length_; }

  /// Left-sided two-parameter derivative on this context's grid. Uses a
  /// precomputed coefficient table on moderate grids, streaming otherwise.
  GridFunction hilfer(const GridFunction& u) const;

  /// Left-sided integral of the context's order alpha.
  GridFunction frac_integral(const GridFunction& u) const;

  /// The derivative as an assembled linear operator (built on first use).
  const HilferOperator& hilfer_operator() const;

  EmbeddingConstants embedding_constants() const;

  GridFunction zeros() const { return GridFunction::zeros(length_, n_); }

 private:
  MusielakFunction mf_;
  PsiWeight psi_;
  FracParams params_;
  std::size_t n_;
  double length_;
  double pairing_factor_;
  mutable std::unique_ptr<HilferOperator> hilfer_op_;
  mutable std::unique_ptr<ProductIntegralOp> integral_op_;
};

/// Seminorm: Luxemburg norm of the left-sided derivative.
double seminorm(const KSpaceContext& ctx, const GridFunction& u);

/// Full norm: Luxemburg norm of u plus the seminorm.
double k_norm(const KSpaceContext& ctx, const GridFunction& u);

struct KModular {
  double full = 0.0;        // modular of u plus modular of the derivative
  double zero_trace = 0.0;  // modular of the derivative alone
};
KModular k_modular(const KSpaceContext& ctx, const GridFunction& u);

/// Power relations between the seminorm and the zero-trace modular, split by
/// the seminorm being above or below 1 (skip within 1e-9 of the sphere).
CheckReport seminorm_modular_sandwich_check(const KSpaceContext& ctx,
                                            const GridFunction& u);

/// Norm bound for the fractional integral with exponent-switched cases;
/// mixed-regime inputs are skipped rather than guessed.
CheckReport integral_bound_check(const KSpaceContext& ctx, const GridFunction& v);

/// Zero-trace norm bound by the seminorm (requires u(0) = u(T) = 0).
CheckReport poincare_check(const KSpaceContext& ctx, const GridFunction& u);

/// Uniform-norm bound by the seminorm (requires zero trace).
CheckReport sup_bound_check(const KSpaceContext& ctx, const GridFunction& u);

/// Pointwise kernel-size condition report. Informational: the kernel is
/// unbounded near the diagonal, so violations close to it are structural;
/// the report maps where they occur instead of asserting.
struct PsiConditionRow {
  double t = 0.0;
  std::size_t pair_count = 0;
  std::size_t violations = 0;
  double max_violating_separation = 0.0;
};
struct PsiConditionReport {
  std::size_t total_pairs = 0;
  std::size_t total_violations = 0;
  double max_violating_separation = 0.0;
  std::vector<PsiConditionRow> rows;
  bool vacuous() const { return total_pairs == 0; }
};
PsiConditionReport psi_condition_check(const PsiWeight& psi, double alpha,
                                       std::size_t grid_size, double length);

/// Empirical norm-equivalence probe over a zero-trace sample set: reports
/// min/max of k_norm/seminorm and asserts the ratio band implied by the
/// embedding constants on the non-mixed samples.
CheckReport norm_equivalence_probe(const KSpaceContext& ctx,
                                   const std::vector<GridFunction>& samples);

}  // namespace kfrac
