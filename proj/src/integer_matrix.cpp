#include "pmod/integer_matrix.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>

#include "pmod/error.hpp"

namespace pmod {

void SparseIntMatrix::add(int row, int col, std::int64_t value) {
  if (value != 0) columns[static_cast<std::size_t>(col)].emplace_back(row, value);
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw LimitExceeded("integer overflow in Smith normal form");
  return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_sub_overflow(a, b, &out)) throw LimitExceeded("integer overflow in Smith normal form");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw LimitExceeded("integer overflow in Smith normal form");
  return out;
}

using Dense = std::vector<std::vector<std::int64_t>>;

// Diagonalizes a small dense block; returns |diagonal| entries in divisibility order.
std::vector<std::int64_t> dense_smith(Dense a) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  std::vector<std::int64_t> diag;
  for (int t = 0; t < std::min(rows, cols); ++t) {
    bool done = false;
    while (!done) {
      // Smallest nonzero magnitude in the trailing block goes to (t, t).
      int pr = -1, pc = -1;
      std::int64_t best = 0;
      for (int i = t; i < rows; ++i) {
        for (int j = t; j < cols; ++j) {
          const std::int64_t v = std::llabs(a[i][j]);
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            pr = i;
            pc = j;
          }
        }
      }
      if (pr < 0) return diag;
      std::swap(a[t], a[pr]);
      for (auto& row : a) std::swap(row[t], row[pc]);

      bool clean = true;
      for (int i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        const std::int64_t q = a[i][t] / a[t][t];
        for (int j = t; j < cols; ++j) a[i][j] = checked_sub(a[i][j], checked_mul(q, a[t][j]));
        if (a[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        const std::int64_t q = a[t][j] / a[t][t];
        for (int i = t; i < rows; ++i) a[i][j] = checked_sub(a[i][j], checked_mul(q, a[i][t]));
        if (a[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold a row carrying a non-multiple into row t and retry.
      bool divisible = true;
      for (int i = t + 1; i < rows && divisible; ++i) {
        for (int j = t + 1; j < cols; ++j) {
          if (a[i][j] % a[t][t] != 0) {
            for (int jj = t; jj < cols; ++jj) a[t][jj] = checked_add(a[t][jj], a[i][jj]);
            divisible = false;
            break;
          }
        }
      }
      done = divisible;
    }
    diag.push_back(std::llabs(a[t][t]));
  }
  return diag;
}

}  // namespace

std::vector<std::int64_t> smith_invariants(const SparseIntMatrix& matrix) {
  // Row-major working copy plus a column -> rows index.
  std::vector<std::map<int, std::int64_t>> rows(static_cast<std::size_t>(matrix.rows));
  std::vector<std::set<int>> col_rows(static_cast<std::size_t>(matrix.cols));
  for (int c = 0; c < matrix.cols; ++c) {
    for (auto [r, v] : matrix.columns[c]) {
      auto& slot = rows[r][c];
      slot = checked_add(slot, v);
      if (slot == 0) {
        rows[r].erase(c);
        col_rows[c].erase(r);
      } else {
        col_rows[c].insert(r);
      }
    }
  }

  std::vector<std::int64_t> units;
  std::vector<bool> col_alive(static_cast<std::size_t>(matrix.cols), true);
  // Eliminate with unit pivots; each one contributes an invariant factor 1.
  while (true) {
    int pc = -1, pr = -1;
    std::size_t best_nnz = 0;
    for (int c = 0; c < matrix.cols; ++c) {
      if (!col_alive[c] || col_rows[c].empty()) continue;
      if (pc >= 0 && col_rows[c].size() >= best_nnz) continue;
      for (int r : col_rows[c]) {
        if (std::llabs(rows[r][c]) == 1) {
          pc = c;
          pr = r;
          best_nnz = col_rows[c].size();
          break;
        }
      }
      if (best_nnz == 1) break;
    }
    if (pc < 0) break;

    const std::int64_t pivot = rows[pr][pc];
    const auto pivot_row = rows[pr];
    const std::vector<int> others(col_rows[pc].begin(), col_rows[pc].end());
    for (int r : others) {
      if (r == pr) continue;
      const std::int64_t f = checked_mul(rows[r][pc], pivot);
      for (auto [c, v] : pivot_row) {
        auto& slot = rows[r][c];
        slot = checked_sub(slot, checked_mul(f, v));
        if (slot == 0) {
          rows[r].erase(c);
          col_rows[c].erase(r);
        } else {
          col_rows[c].insert(r);
        }
      }
    }
    for (auto [c, v] : pivot_row) col_rows[c].erase(pr);
    rows[pr].clear();
    col_alive[pc] = false;
    units.push_back(1);
  }

  // Remaining block (typically empty for cubical complexes).
  std::vector<int> live_rows, live_cols;
  for (int r = 0; r < matrix.rows; ++r) {
    if (!rows[r].empty()) live_rows.push_back(r);
  }
  for (int c = 0; c < matrix.cols; ++c) {
    if (col_alive[c] && !col_rows[c].empty()) live_cols.push_back(c);
  }
  if (!live_rows.empty()) {
    if (live_rows.size() * live_cols.size() > 25'000'000) {
      throw LimitExceeded("residual Smith normal form block too large");
    }
    std::map<int, int> col_pos;
    for (std::size_t j = 0; j < live_cols.size(); ++j) col_pos[live_cols[j]] = static_cast<int>(j);
    Dense dense(live_rows.size(), std::vector<std::int64_t>(live_cols.size(), 0));
    for (std::size_t i = 0; i < live_rows.size(); ++i) {
      for (auto [c, v] : rows[live_rows[i]]) dense[i][col_pos.at(c)] = v;
    }
    auto rest = dense_smith(std::move(dense));
    units.insert(units.end(), rest.begin(), rest.end());
  }
  std::sort(units.begin(), units.end());
  return units;
}

namespace {

std::int64_t mod_p(std::int64_t v) {
  v %= kRankPrime;
  return v < 0 ? v + kRankPrime : v;
}

std::int64_t inverse_mod_p(std::int64_t a) {
  std::int64_t result = 1, base = a, e = kRankPrime - 2;
  while (e > 0) {
    if (e & 1) result = (result * base) % kRankPrime;
    base = (base * base) % kRankPrime;
    e >>= 1;
  }
  return result;
}

}  // namespace

std::size_t rank_mod_p(const SparseIntMatrix& matrix) {
  // Column elimination keyed by pivot row (sparse "column reduction").
  std::map<int, std::map<int, std::int64_t>> reduced;  // pivot row -> column
  std::size_t rank = 0;
  for (int c = 0; c < matrix.cols; ++c) {
    std::map<int, std::int64_t> col;
    for (auto [r, v] : matrix.columns[c]) {
      auto& slot = col[r];
      slot = mod_p(slot + v);
      if (slot == 0) col.erase(r);
    }
    while (!col.empty()) {
      const int low = col.rbegin()->first;
      auto it = reduced.find(low);
      if (it == reduced.end()) {
        const std::int64_t inv = inverse_mod_p(col.rbegin()->second);
        for (auto& [r, v] : col) v = (v * inv) % kRankPrime;
        reduced.emplace(low, std::move(col));
        ++rank;
        break;
      }
      const std::int64_t f = col.rbegin()->second;
      for (auto [r, v] : it->second) {
        auto& slot = col[r];
        slot = mod_p(slot - (f * v) % kRankPrime);
        if (slot == 0) col.erase(r);
      }
    }
  }
  return rank;
}

std::vector<std::vector<std::int64_t>> kernel_mod_p(const SparseIntMatrix& matrix) {
  const int rows = matrix.rows;
  const int cols = matrix.cols;
  std::vector<std::vector<std::int64_t>> a(static_cast<std::size_t>(rows), std::vector<std::int64_t>(cols, 0));
  for (int c = 0; c < cols; ++c) {
    for (auto [r, v] : matrix.columns[c]) a[r][c] = mod_p(a[r][c] + v);
  }
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int sel = -1;
    for (int i = r; i < rows; ++i) {
      if (a[i][c] != 0) {
        sel = i;
        break;
      }
    }
    if (sel < 0) continue;
    std::swap(a[sel], a[r]);
    const std::int64_t inv = inverse_mod_p(a[r][c]);
    for (int j = c; j < cols; ++j) a[r][j] = (a[r][j] * inv) % kRankPrime;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const std::int64_t f = a[i][c];
      for (int j = c; j < cols; ++j) a[i][j] = mod_p(a[i][j] - (f * a[r][j]) % kRankPrime);
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<std::int64_t>> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<std::int64_t> v(static_cast<std::size_t>(cols), 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = mod_p(-a[i][free]);
    for (auto& x : v) {
      if (x > kRankPrime / 2) x -= kRankPrime;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace pmod
