#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "kfrac/errors.hpp"

namespace kfrac {

/// Minimal row-major dense matrix: just enough linear algebra for operator
/// assembly (matvec, transpose-matvec, products, Cholesky and LU solves).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }

  const double* row(std::size_t i) const { return a_.data() + i * cols_; }
  double* row(std::size_t i) { return a_.data() + i * cols_; }

  std::vector<double> multiply(const std::vector<double>& x) const {
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* r = row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  std::vector<double> multiply_transpose(const std::vector<double>& x) const {
    std::vector<double> y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* r = row(i);
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) y[j] += r[j] * xi;
    }
    return y;
  }

  static DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw NumericalFailure("DenseMatrix: shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        const double* br = b.row(k);
        double* cr = c.row(i);
        for (std::size_t j = 0; j < b.cols(); ++j) cr[j] += aik * br[j];
      }
    }
    return c;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Cholesky factorization of a symmetric positive definite matrix.
class CholeskySolver {
 public:
  explicit CholeskySolver(DenseMatrix m) : l_(std::move(m)) {
    const std::size_t n = l_.rows();
    if (l_.cols() != n) throw NumericalFailure("Cholesky: matrix not square");
    for (std::size_t j = 0; j < n; ++j) {
      double d = l_(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > 0.0)) throw NumericalFailure("Cholesky: matrix not positive definite");
      const double dj = std::sqrt(d);
      l_(j, j) = dj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = l_(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / dj;
      }
    }
  }

  std::vector<double> solve(std::vector<double> b) const {
    const std::size_t n = l_.rows();
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * b[k];
      b[i] = s / l_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * b[k];
      b[ii] = s / l_(ii, ii);
    }
    return b;
  }

 private:
  DenseMatrix l_;
};

/// LU factorization with partial pivoting, for indefinite systems.
class LuSolver {
 public:
  explicit LuSolver(DenseMatrix m) : lu_(std::move(m)), piv_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw NumericalFailure("LU: matrix not square");
    for (std::size_t i = 0; i < n; ++i) piv_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const double v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best == 0.0) throw NumericalFailure("LU: singular matrix");
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(piv_[k], piv_[p]);
      }
      const double d = lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = lu_(i, k) / d;
        lu_(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    const std::size_t n = lu_.rows();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (std::size_t i = 1; i < n; ++i) {
      double s = x[i];
      for (std::size_t k = 0; k < i; ++k) s -= lu_(i, k) * x[k];
      x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= lu_(ii, k) * x[k];
      x[ii] = s / lu_(ii, ii);
    }
    return x;
  }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> piv_;
};

}  // namespace kfrac
