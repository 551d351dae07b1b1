#pragma once

// Integer cubical homology of the box relative to A or B, and the
// intersection pairing between primal k-chains and dual (n-k)-chains.
//
// The dual grid of a complex has extent N+1 per axis: its points are the
// primal cell centers plus the two end planes. A dual cell with doubled
// coordinates t (all entries in [1, 2N+1]) is dual to the primal cell t - 1,
// and the two meet transversally in exactly one point. Dual cells with a
// coordinate 0 or 2N+2 lie in an end plane and have no primal partner.

#include <cstdint>
#include <map>
#include <vector>

#include "pmod/grid_complex.hpp"

namespace pmod {

enum class Grid { primal, dual };

struct Chain {
  int dim = 0;
  Grid grid = Grid::primal;
  std::map<CellId, std::int64_t> coeffs;

  bool empty() const { return coeffs.empty(); }
  void add(const CellId& cell, std::int64_t c);
  Chain& operator+=(const Chain& other);
};

struct HomologyReport {
  int dim = 0;
  Side subcomplex = Side::none;
  int betti = 0;
  std::vector<std::int64_t> torsion;
  std::vector<Chain> generators;
};

inline constexpr std::size_t kHomologyCellLimit = 20000;

CubicalLattice dual_lattice(const GridComplex& complex);
CubicalLattice refined_lattice(const GridComplex& complex);
const CubicalLattice& lattice_of(const GridComplex& complex, Grid grid, CubicalLattice& dual_storage);

Chain boundary(const GridComplex& complex, const Chain& chain);

// betti and torsion of H_dim(Q, subcomplex) over Z.
HomologyReport relative_homology(const GridComplex& complex, Side subcomplex, int dim);

bool is_relative_cycle(const GridComplex& complex, const Chain& chain, Side subcomplex);

// Straight relative cycles: Q1 x {middle of Q2} generating H_k(Q, A) on the
// primal grid, and {middle of Q1} x Q2 generating H_{n-k}(Q, B) on the dual grid.
Chain axis_generator_A(const GridComplex& complex);
Chain dual_axis_generator_B(const GridComplex& complex);

// Parity of transverse incidences between a primal relative k-cycle mod A and
// a dual relative (n-k)-cycle mod B that stays off the cells touching A.
// Throws InvalidInput when the chains are not in that position.
int intersection_parity(const GridComplex& complex, const Chain& sigma_a, const Chain& sigma_b);

// Cells of the once-refined lattice (extent 2N) covering a set of primal faces.
std::vector<CellId> refine_cells(const std::vector<CellId>& primal);

// True iff every relative k-cycle mod A of Q minus the closed face set has zero
// degree over the reference dual slice, i.e. the inclusion into H_k(Q, A) is
// trivial. `refined_faces` live on refined_lattice(complex). Throws
// LimitExceeded above kHomologyCellLimit refined cells and InvalidInput when
// the set meets A.
bool is_in_star_family(const GridComplex& complex, const std::vector<CellId>& refined_faces);

}  // namespace pmod
