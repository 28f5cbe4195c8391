#pragma once

#include <cstddef>

#include "pfn/types.hpp"

namespace pfn::lp {

/// maximize c . x  subject to  A_eq x = b_eq,  x >= 0.
struct LinearProgram {
  Matrix A_eq;
  Vector b_eq;
  Vector c;
};

enum class Status { optimal, infeasible, unbounded };

struct Options {
  /// Reduced-cost and pivot-element threshold.
  double pivot_tol = 1e-11;
  /// Phase-one residual (relative to max(1, ||b||_inf)) treated as feasible.
  double feasibility_tol = 1e-9;
  std::size_t max_pivots = 1'000'000;
};

struct Solution {
  Status status = Status::infeasible;
  Vector x;
  double objective = 0.0;
  std::size_t pivots = 0;
  /// ||A_eq x - b_eq||_inf of the returned point.
  double residual = 0.0;
};

/// Dense two-phase primal simplex with Bland's anti-cycling rule. Intended
/// for the small programs (tens of rows, up to a few thousand columns) that
/// region queries produce. The final basic solution is recomputed from the
/// original data to shed accumulated tableau error.
Solution solve(const LinearProgram& program, const Options& options = {});

}  // namespace pfn::lp
