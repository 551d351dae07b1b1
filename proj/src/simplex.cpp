#include "pmod/simplex.hpp"

#include <cmath>
#include <limits>

#include "pmod/error.hpp"

namespace pmod {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), t_(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  // Row `rows_` is the reduced cost row; its rhs holds -objective.
  double& cost(int c) { return at(rows_, c); }

  void pivot(int pr, int pc) {
    const double inv = 1.0 / at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      double* dst = &at(r, 0);
      const double* src = &at(pr, 0);
      for (int c = 0; c <= cols_; ++c) dst[c] -= f * src[c];
      at(r, pc) = 0.0;
    }
  }

  int rows_;
  int cols_;

 private:
  std::vector<double> t_;
};

// Runs simplex iterations on columns [0, active_cols). Returns status.
LpStatus iterate(Tableau& tab, std::vector<int>& basis, int active_cols, int& budget) {
  int degenerate_run = 0;
  while (true) {
    if (budget-- <= 0) return LpStatus::iteration_limit;
    const bool bland = degenerate_run > 50;
    int pc = -1;
    double best = -kCostTol;
    for (int c = 0; c < active_cols; ++c) {
      const double rc = tab.cost(c);
      if (rc < best) {
        pc = c;
        if (bland) break;
        best = rc;
      }
    }
    if (pc < 0) return LpStatus::optimal;
    int pr = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < tab.rows_; ++r) {
      const double v = tab.at(r, pc);
      if (v <= kPivotTol) continue;
      const double q = tab.rhs(r) / v;
      if (pr < 0 || q < ratio - 1e-12 || (std::abs(q - ratio) <= 1e-12 && basis[r] < basis[pr])) {
        pr = r;
        ratio = q;
      }
    }
    if (pr < 0) return LpStatus::unbounded;
    degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
    tab.pivot(pr, pc);
    basis[pr] = pc;
  }
}

}  // namespace

LpResult solve_standard_lp(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                           const std::vector<double>& c, int max_pivots) {
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(c.size());
  if (static_cast<int>(b.size()) != rows) throw InvalidInput("LP rhs size mismatch");
  for (const auto& row : a) {
    if (static_cast<int>(row.size()) != cols) throw InvalidInput("LP row size mismatch");
  }
  // Columns: original [0, cols), artificials [cols, cols + rows).
  Tableau tab(rows, cols + rows);
  std::vector<int> basis(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    const double s = b[r] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < cols; ++j) tab.at(r, j) = s * a[r][j];
    tab.at(r, cols + r) = 1.0;
    tab.rhs(r) = s * b[r];
    basis[r] = cols + r;
  }
  // Phase 1: minimize the sum of artificials.
  for (int j = 0; j <= cols + rows; ++j) tab.cost(j) = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < cols; ++j) tab.cost(j) -= tab.at(r, j);
    tab.rhs(rows) -= tab.rhs(r);
  }
  int budget = max_pivots;
  LpResult result;
  auto status = iterate(tab, basis, cols + rows, budget);
  if (status == LpStatus::iteration_limit) {
    result.status = status;
    return result;
  }
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  if (-tab.rhs(rows) > 1e-8 * scale) {
    result.status = LpStatus::infeasible;
    return result;
  }
  // Drive remaining artificials out of the basis where possible.
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < cols) continue;
    for (int j = 0; j < cols; ++j) {
      if (std::abs(tab.at(r, j)) > kPivotTol) {
        tab.pivot(r, j);
        basis[r] = j;
        break;
      }
    }
  }
  // Phase 2 on the original columns; redundant rows keep their artificial at 0.
  for (int j = 0; j <= cols + rows; ++j) tab.cost(j) = 0.0;
  for (int j = 0; j < cols; ++j) tab.cost(j) = c[j];
  for (int r = 0; r < rows; ++r) {
    if (basis[r] >= cols) continue;
    const double f = c[basis[r]];
    if (f == 0.0) continue;
    for (int j = 0; j <= cols + rows; ++j) tab.cost(j) -= f * tab.at(r, j);
  }
  status = iterate(tab, basis, cols, budget);
  result.status = status;
  if (status != LpStatus::optimal) return result;
  result.x.assign(static_cast<std::size_t>(cols), 0.0);
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < cols) result.x[basis[r]] = std::max(0.0, tab.rhs(r));
  }
  result.value = 0.0;
  for (int j = 0; j < cols; ++j) result.value += c[j] * result.x[j];
  return result;
}

}  // namespace pmod
