#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kfrac/dense_matrix.hpp"
#include "kfrac/grid_function.hpp"

namespace kfrac {

enum class PsiFamily { Linear, Exponential, Power, Custom };

/// Increasing C^1 weight psi on [0, T] together with its derivative.
class PsiWeight {
 public:
  using Map = std::function<double(double)>;

  static PsiWeight linear();                  // psi(t) = t
  static PsiWeight exponential(double rate);  // psi(t) = exp(rate t)
  static PsiWeight power(double gamma);       // psi(t) = t^gamma, gamma >= 1
  static PsiWeight custom(Map psi, Map dpsi);

  PsiFamily family() const { return family_; }
  double value(double t) const { return psi_(t); }
  double derivative(double t) const { return dpsi_(t); }

  /// Sampled strict-increase and derivative-consistency checks; throws
  /// InvariantViolation on failure. The derivative is compared against a
  /// fourth-order difference of psi at interior samples (1e-6 relative).
  void validate(double length, std::size_t samples = 64) const;

 private:
  PsiWeight() = default;
  PsiFamily family_ = PsiFamily::Custom;
  Map psi_, dpsi_;
};

/// Order/type pair (alpha, beta) with the derived order eta = alpha(1-beta)+beta.
class FracParams {
 public:
  FracParams(double alpha, double beta);
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double eta() const { return alpha_ * (1.0 - beta_) + beta_; }

 private:
  double alpha_, beta_;
};

// Weighted fractional integrals of order alpha in (0, 1]. Each node value is
// a product-trapezoidal approximation: the weakly singular kernel is
// integrated exactly against the piecewise-linear interpolant of v in the
// transformed variable s = psi(t). The case alpha = 1 reduces to the plain
// psi-weighted integral.
GridFunction frac_integral_left(const PsiWeight& psi, double alpha,
                                const GridFunction& v);
GridFunction frac_integral_right(const PsiWeight& psi, double alpha,
                                 const GridFunction& v);

// Weighted derivatives of order alpha in (0, 1): integrate at order 1 - alpha,
// then differentiate with second-order stencils and divide by psi'. Left
// (right) variants pin the value 0 at the left (right) endpoint, the
// continuous limit for data vanishing there.
GridFunction rl_derivative_left(const PsiWeight& psi, double alpha,
                                const GridFunction& v);
GridFunction rl_derivative_right(const PsiWeight& psi, double alpha,
                                 const GridFunction& v);

// Two-parameter derivatives: integral of order eta - alpha composed with the
// derivative of order eta. beta = 0 reduces to the one-parameter derivative,
// beta = 1 to the integral of the plain psi-scaled derivative.
GridFunction hilfer_left(const PsiWeight& psi, const FracParams& params,
                         const GridFunction& v);
GridFunction hilfer_right(const PsiWeight& psi, const FracParams& params,
                          const GridFunction& v);

/// Plain psi-scaled derivative (1/psi') dv/dx with one-sided ends.
GridFunction psi_scaled_derivative(const PsiWeight& psi, const GridFunction& v);
GridFunction psi_scaled_derivative_reversed(const PsiWeight& psi,
                                            const GridFunction& v);

struct FtcReport {
  double discrepancy = 0.0;         // max-norm of I(Dv) - v on the given grid
  double coarse_discrepancy = 0.0;  // same on the twice-coarser grid
  double order = 0.0;               // log2(coarse / fine)
  bool pass = false;
  std::string note;
};

/// Reconstruction check: integrating the order-alpha derivative of v should
/// reproduce v when v vanishes at the base point. Passes when the measured
/// refinement order is at least 0.8 (or the discrepancy is at round-off).
FtcReport ftc_compose_check(const PsiWeight& psi, const FracParams& params,
                            const GridFunction& v);

/// Dense coefficient table of a product-integration operator; row i holds the
/// node weights reproducing the integral at node i. Immutable once built.
class ProductIntegralOp {
 public:
  enum class Side { Left, Right };

  ProductIntegralOp(const PsiWeight& psi, double alpha, std::size_t n, double length,
                    Side side);

  GridFunction apply(const GridFunction& v) const;
  const DenseMatrix& table() const { return table_; }
  double length() const { return length_; }

 private:
  DenseMatrix table_;
  double length_;
};

/// Left-sided two-parameter derivative as a composed linear operator with a
/// precomputed dense representation, for contexts that apply it repeatedly.
class HilferOperator {
 public:
  HilferOperator(const PsiWeight& psi, const FracParams& params, std::size_t n,
                 double length);

  GridFunction apply(const GridFunction& v) const;

  /// Dense matrix of the full composition (assembled on demand and cached).
  const DenseMatrix& dense() const;

  std::size_t size() const { return n_; }
  double length() const { return length_; }

 private:
  std::size_t n_;
  double length_;
  // Stages: optional inner integral (order 1 - eta), stencil derivative
  // (rows of the divided-difference scheme over psi'), optional outer
  // integral (order eta - alpha).
  std::unique_ptr<ProductIntegralOp> inner_;
  DenseMatrix derivative_rows_;
  std::unique_ptr<ProductIntegralOp> outer_;
  mutable std::unique_ptr<DenseMatrix> dense_;
};

/// Stencil matrix of the psi-scaled derivative (tridiagonal plus one-sided
/// end rows), exposed for operator assembly.
DenseMatrix psi_derivative_matrix(const PsiWeight& psi, std::size_t n, double length);

}  // namespace kfrac
