#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace kfrac {

struct StudyRow {
  std::size_t n = 0;
  double error = 0.0;
  double order = 0.0;  // successive order vs the previous row; 0 on the first
};

struct StudyResult {
  std::vector<StudyRow> rows;
  double fitted_order = 0.0;  // least-squares slope of log(error) vs log(1/n)
  bool at_round_off = false;  // finest error below the round-off floor
};

/// Runs error(n) over doubling grids n_min, 2(n_min-1)+1, ... up to n_max and
/// fits the empirical convergence order. Errors below `floor` are treated as
/// converged and excluded from the fit.
inline StudyResult convergence_study(const std::function<double(std::size_t)>& error,
                                     std::size_t n_min, std::size_t n_max,
                                     double floor = 1e-12) {
  StudyResult res;
  double prev = 0.0;
  for (std::size_t n = n_min; n <= n_max; n = 2 * (n - 1) + 1) {
    StudyRow row;
    row.n = n;
    row.error = error(n);
    if (!res.rows.empty() && prev > floor && row.error > floor)
      row.order = std::log2(prev / row.error);
    res.rows.push_back(row);
    prev = row.error;
  }
  // Least-squares fit over the rows that sit above the round-off floor.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& row : res.rows) {
    if (row.error <= floor) continue;
    const double x = -std::log2(static_cast<double>(row.n - 1));
    const double y = std::log2(row.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    res.fitted_order = (static_cast<double>(m) * sxy - sx * sy) /
                       (static_cast<double>(m) * sxx - sx * sx);
  } else {
    res.at_round_off = true;
  }
  if (!res.rows.empty() && res.rows.back().error <= floor) res.at_round_off = true;
  return res;
}

}  // namespace kfrac
