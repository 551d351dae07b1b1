#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace pmod {

// Column-major sparse integer matrix; entries within a column need not be sorted.
struct SparseIntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<std::pair<int, std::int64_t>>> columns;

  SparseIntMatrix() = default;
  SparseIntMatrix(int r, int c) : rows(r), cols(c), columns(static_cast<std::size_t>(c)) {}
  void add(int row, int col, std::int64_t value);
};

// Nonzero invariant factors of the Smith normal form, in divisibility order.
// Their count is the rank over Q. Throws LimitExceeded on int64 overflow.
std::vector<std::int64_t> smith_invariants(const SparseIntMatrix& matrix);

inline constexpr std::int64_t kRankPrime = 2147483647;  // 2^31 - 1

// Rank over GF(kRankPrime).
std::size_t rank_mod_p(const SparseIntMatrix& matrix);

// Basis of the right null space over GF(kRankPrime), entries lifted to the
// symmetric range (-p/2, p/2]. Dense; intended for small matrices.
std::vector<std::vector<std::int64_t>> kernel_mod_p(const SparseIntMatrix& matrix);

}  // namespace pmod
