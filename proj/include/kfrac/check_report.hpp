#pragma once

#include <string>

namespace kfrac {

/// Outcome of a single verification check. For checks that sweep a sample
/// lattice, lhs/rhs hold the worst (smallest-margin) pair encountered.
struct CheckReport {
  std::string name;
  std::string anchor;  // stable identifier of the inequality being checked
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs at the worst sample
  bool pass = false;
  bool skipped = false;
  std::string note;

  bool failed() const { return !pass && !skipped; }
};

}  // namespace kfrac
