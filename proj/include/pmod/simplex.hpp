#pragma once

#include <vector>

namespace pmod {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

// min c^T x subject to A x = b, x >= 0, with A dense row-major (rows x cols).
// Two-phase tableau simplex; Dantzig pricing with a switch to Bland's rule
// after a run of degenerate pivots.
LpResult solve_standard_lp(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                           const std::vector<double>& c, int max_pivots = 200000);

}  // namespace pmod
