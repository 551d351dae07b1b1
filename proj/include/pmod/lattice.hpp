#pragma once

// Combinatorics of a cubical grid on an axis box.
//
// Cells are addressed by doubled lattice coordinates: along each axis an even
// coordinate 2i is the grid point i and an odd coordinate 2i+1 is the interval
// (i, i+1). A cell spans exactly the axes where its coordinate is odd, so its
// dimension is the number of odd coordinates.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pmod {

inline constexpr int kMaxDim = 4;

struct CellId {
  std::array<std::int32_t, kMaxDim> coord{};

  int dim() const {
    int d = 0;
    for (auto c : coord) d += (c & 1);
    return d;
  }
  bool spans(int axis) const { return (coord[axis] & 1) != 0; }

  auto operator<=>(const CellId&) const = default;
  bool operator==(const CellId&) const = default;
};

std::string to_string(const CellId& id);

struct CellIdHash {
  std::size_t operator()(const CellId& id) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto c : id.coord) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(c));
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct Facet {
  CellId cell;
  int sign;
};

// Which relative subcomplex a homological computation works modulo.
enum class Side { none, A, B };

// Box grid with `extent[a]` intervals along axis a. Axes [0, k) are the Q1
// axes (their end planes form A), axes [k, n) are the Q2 axes (end planes form
// B).
class CubicalLattice {
 public:
  CubicalLattice() = default;
  CubicalLattice(int n, int k, std::array<int, kMaxDim> extent);

  int n() const { return n_; }
  int k() const { return k_; }
  int extent(int axis) const { return extent_[axis]; }
  bool is_a_axis(int axis) const { return axis < k_; }

  bool contains(const CellId& id) const;

  // Cells of dimension `dim` in lexicographic order of doubled coordinates.
  const std::vector<CellId>& cells(int dim) const { return cells_[dim]; }
  std::size_t num_cells(int dim) const { return cells_[dim].size(); }
  std::size_t total_cells() const;

  // Index of `id` within cells(id.dim()); -1 if absent.
  std::int64_t index_of(const CellId& id) const;

  // Facets with orientation signs; the signs satisfy boundary(boundary) = 0.
  std::vector<Facet> facets(const CellId& id) const;

  // Top-dimensional cells whose closure contains `id`.
  std::vector<CellId> incident_top_cells(const CellId& id) const;

  // Vertices of the closure of `id`.
  std::vector<CellId> closure_vertices(const CellId& id) const;

  // The cell lies inside one of the end planes of an A axis (resp. B axis).
  bool in_A(const CellId& id) const;
  bool in_B(const CellId& id) const;
  bool in(Side side, const CellId& id) const;
  // The closure of the cell meets an A (resp. B) end plane.
  bool touches_A(const CellId& id) const;
  bool touches_B(const CellId& id) const;
  bool touches(Side side, const CellId& id) const;

 private:
  std::size_t linear(const CellId& id) const;

  int n_ = 0;
  int k_ = 0;
  std::array<int, kMaxDim> extent_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::array<std::vector<CellId>, kMaxDim + 1> cells_;
  std::vector<std::int32_t> lookup_;
};

}  // namespace pmod
