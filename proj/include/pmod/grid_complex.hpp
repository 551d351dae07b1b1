#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "pmod/lattice.hpp"

namespace pmod {

using Point = std::array<double, kMaxDim>;

enum class DeformationKind { identity, shear, radial_bump };

// Built-in coordinate maps from the reference box onto the physical cube.
//   shear(s):          x0 -> x0 + s * x1
//   radial_bump(a):    x  -> x + a * beta(|x - c|) * (x - c), beta(r) = (1 - r^2/R^2)^2
//                      inside the ball of radius R = min side / 2 about the box
//                      center c, identity outside (fixes the boundary of Q).
struct Deformation {
  DeformationKind kind = DeformationKind::identity;
  double parameter = 0.0;

  bool is_identity() const { return kind == DeformationKind::identity; }
};

std::string to_string(DeformationKind kind);
DeformationKind deformation_from_string(const std::string& name);

struct BoxSpec {
  int n = 2;
  int k = 1;
  std::vector<double> side_q1{1.0};
  std::vector<double> side_q2{1.0};
  int m = 4;  // cells per unit length
  Deformation deformation;

  double side(int axis) const { return axis < k ? side_q1[axis] : side_q2[axis - k]; }
  // Throws InvalidInput on any violated field invariant.
  void validate() const;
};

using JacobianMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Nonnegative value per top-dimensional cell, indexed like GridComplex::cells(n).
struct DensityField {
  std::vector<double> values;

  static DensityField constant(std::size_t cells, double c) { return {std::vector<double>(cells, c)}; }
  std::size_t size() const { return values.size(); }
};

// Cubical decomposition of Q = Q1 x Q2 with per-cell Hausdorff measures.
// Immutable after build().
class GridComplex {
 public:
  // build_grid: validates the spec, lays out m * side cells per axis and
  // computes every cell measure. Throws InvalidInput on a degenerate
  // deformation Jacobian.
  static GridComplex build(const BoxSpec& spec);

  const BoxSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  int k() const { return spec_.k; }
  int m() const { return spec_.m; }
  double spacing() const { return spacing_; }
  int cells_along(int axis) const { return lattice_.extent(axis); }
  double side(int axis) const { return spec_.side(axis); }

  const CubicalLattice& lattice() const { return lattice_; }
  const std::vector<CellId>& cells(int dim) const { return lattice_.cells(dim); }
  std::size_t num_cells(int dim) const { return lattice_.num_cells(dim); }
  std::size_t num_top_cells() const { return lattice_.num_cells(spec_.n); }
  std::size_t total_cells() const { return lattice_.total_cells(); }

  // Index within cells(id.dim()); throws InvalidInput for unknown ids.
  std::size_t index(const CellId& id) const;
  bool contains(const CellId& id) const { return lattice_.contains(id); }

  // H^dim measure of the (possibly deformed) cell.
  double measure(const CellId& id) const;
  double measure(int dim, std::size_t index) const { return measures_[dim][index]; }

  // Reference-box coordinates of the cell center.
  Point center(const CellId& id) const;
  Point physical(const Point& reference) const;
  JacobianMatrix jacobian(const Point& reference) const;

  // Distance (reference coordinates) from the closure of the cell to the
  // nearest end plane of an A axis (resp. B axis).
  double distance_to_A(const CellId& id) const;
  double distance_to_B(const CellId& id) const;

 private:
  GridComplex() = default;
  double deformed_measure(const CellId& id) const;

  BoxSpec spec_;
  double spacing_ = 0.0;
  CubicalLattice lattice_;
  std::array<std::vector<double>, kMaxDim + 1> measures_;
};

// Convenience wrapper with the operation name used throughout the tools.
inline GridComplex build_grid(const BoxSpec& spec) { return GridComplex::build(spec); }

// Throws InvalidInput for unknown ids.
double cell_measure(const GridComplex& complex, const CellId& id);

// Mean of rho over the top cells incident to a lower-dimensional face.
double face_density_value(const GridComplex& complex, const DensityField& rho, const CellId& face);

}  // namespace pmod
