#include "pmod/homology.hpp"

#include <unordered_map>
#include <unordered_set>

#include "pmod/error.hpp"
#include "pmod/integer_matrix.hpp"

namespace pmod {

void Chain::add(const CellId& cell, std::int64_t c) {
  if (c == 0) return;
  auto& slot = coeffs[cell];
  slot += c;
  if (slot == 0) coeffs.erase(cell);
}

Chain& Chain::operator+=(const Chain& other) {
  if (other.dim != dim || other.grid != grid) throw InvalidInput("adding chains of different dimension or grid");
  for (const auto& [cell, c] : other.coeffs) add(cell, c);
  return *this;
}

CubicalLattice dual_lattice(const GridComplex& complex) {
  std::array<int, kMaxDim> extent{};
  for (int a = 0; a < complex.n(); ++a) extent[a] = complex.cells_along(a) + 1;
  return CubicalLattice(complex.n(), complex.k(), extent);
}

CubicalLattice refined_lattice(const GridComplex& complex) {
  std::array<int, kMaxDim> extent{};
  for (int a = 0; a < complex.n(); ++a) extent[a] = 2 * complex.cells_along(a);
  return CubicalLattice(complex.n(), complex.k(), extent);
}

const CubicalLattice& lattice_of(const GridComplex& complex, Grid grid, CubicalLattice& dual_storage) {
  if (grid == Grid::primal) return complex.lattice();
  dual_storage = dual_lattice(complex);
  return dual_storage;
}

Chain boundary(const GridComplex& complex, const Chain& chain) {
  CubicalLattice storage;
  const auto& lat = lattice_of(complex, chain.grid, storage);
  Chain out;
  out.grid = chain.grid;
  out.dim = chain.dim - 1;
  if (chain.dim == 0) {
    out.dim = 0;
    return out;
  }
  for (const auto& [cell, c] : chain.coeffs) {
    if (!lat.contains(cell) || cell.dim() != chain.dim) throw InvalidInput("chain cell " + to_string(cell) + " is malformed");
    for (const auto& f : lat.facets(cell)) out.add(f.cell, c * f.sign);
  }
  return out;
}

bool is_relative_cycle(const GridComplex& complex, const Chain& chain, Side subcomplex) {
  CubicalLattice storage;
  const auto& lat = lattice_of(complex, chain.grid, storage);
  const Chain b = boundary(complex, chain);
  for (const auto& [cell, c] : b.coeffs) {
    if (!lat.in(subcomplex, cell)) return false;
  }
  return true;
}

namespace {

struct RelativeCells {
  std::vector<CellId> cells;
  std::unordered_map<CellId, int, CellIdHash> index;
};

RelativeCells relative_cells(const CubicalLattice& lat, Side sub, int dim,
                             const std::function<bool(const CellId&)>& keep = nullptr) {
  RelativeCells out;
  if (dim < 0 || dim > lat.n()) return out;
  for (const auto& c : lat.cells(dim)) {
    if (lat.in(sub, c)) continue;
    if (keep && !keep(c)) continue;
    out.index.emplace(c, static_cast<int>(out.cells.size()));
    out.cells.push_back(c);
  }
  return out;
}

SparseIntMatrix boundary_matrix(const CubicalLattice& lat, const RelativeCells& rows, const RelativeCells& cols) {
  SparseIntMatrix mat(static_cast<int>(rows.cells.size()), static_cast<int>(cols.cells.size()));
  for (std::size_t j = 0; j < cols.cells.size(); ++j) {
    for (const auto& f : lat.facets(cols.cells[j])) {
      auto it = rows.index.find(f.cell);
      if (it != rows.index.end()) mat.add(it->second, static_cast<int>(j), f.sign);
    }
  }
  return mat;
}

std::vector<std::int64_t> chain_vector(const Chain& chain, const RelativeCells& cells) {
  std::vector<std::int64_t> v(cells.cells.size(), 0);
  for (const auto& [cell, c] : chain.coeffs) {
    auto it = cells.index.find(cell);
    if (it != cells.index.end()) v[it->second] = c;
  }
  return v;
}

void append_column(SparseIntMatrix& mat, const std::vector<std::int64_t>& v) {
  mat.columns.emplace_back();
  ++mat.cols;
  for (std::size_t i = 0; i < v.size(); ++i) mat.add(static_cast<int>(i), mat.cols - 1, v[i]);
}

// Straight sub-box cycles: cells spanning exactly `axes`, other coordinates at
// the middle grid point.
Chain slice_chain(const CubicalLattice& lat, unsigned axes_mask, int dim) {
  Chain chain;
  chain.dim = dim;
  for (const auto& c : lat.cells(dim)) {
    bool ok = true;
    for (int a = 0; a < lat.n() && ok; ++a) {
      const bool spanned = (axes_mask >> a) & 1u;
      if (spanned != c.spans(a)) ok = false;
      if (!spanned && c.coord[a] != 2 * (lat.extent(a) / 2)) ok = false;
    }
    if (ok) chain.add(c, 1);
  }
  return chain;
}

}  // namespace

HomologyReport relative_homology(const GridComplex& complex, Side subcomplex, int dim) {
  const auto& lat = complex.lattice();
  if (lat.total_cells() > kHomologyCellLimit) {
    throw LimitExceeded("complex has " + std::to_string(lat.total_cells()) + " cells; homology limit is " +
                        std::to_string(kHomologyCellLimit));
  }
  if (dim < 0 || dim > complex.n()) throw InvalidInput("homology dimension out of range");
  HomologyReport report;
  report.dim = dim;
  report.subcomplex = subcomplex;

  const auto below = relative_cells(lat, subcomplex, dim - 1);
  const auto here = relative_cells(lat, subcomplex, dim);
  const auto above = relative_cells(lat, subcomplex, dim + 1);

  std::size_t rank_here = 0;
  if (dim > 0) rank_here = smith_invariants(boundary_matrix(lat, below, here)).size();
  std::vector<std::int64_t> inv_above;
  if (dim < complex.n()) inv_above = smith_invariants(boundary_matrix(lat, here, above));
  report.betti = static_cast<int>(here.cells.size() - rank_here - inv_above.size());
  for (auto d : inv_above) {
    if (d > 1) report.torsion.push_back(d);
  }
  if (report.betti == 0) return report;

  // Generators: straight slices first, then lifted kernel vectors.
  SparseIntMatrix span = dim < complex.n() ? boundary_matrix(lat, here, above) : SparseIntMatrix(static_cast<int>(here.cells.size()), 0);
  std::size_t span_rank = rank_mod_p(span);
  auto try_add = [&](const Chain& candidate) {
    if (candidate.empty() || !is_relative_cycle(complex, candidate, subcomplex)) return;
    SparseIntMatrix trial = span;
    append_column(trial, chain_vector(candidate, here));
    const std::size_t r = rank_mod_p(trial);
    if (r > span_rank) {
      span = std::move(trial);
      span_rank = r;
      report.generators.push_back(candidate);
    }
  };
  for (unsigned mask = 0; mask < (1u << complex.n()); ++mask) {
    if (static_cast<int>(report.generators.size()) == report.betti) break;
    if (__builtin_popcount(mask) != dim) continue;
    try_add(slice_chain(lat, mask, dim));
  }
  if (static_cast<int>(report.generators.size()) < report.betti && here.cells.size() <= 3000) {
    const auto kernel = dim > 0 ? kernel_mod_p(boundary_matrix(lat, below, here))
                                : std::vector<std::vector<std::int64_t>>{};
    for (const auto& v : kernel) {
      if (static_cast<int>(report.generators.size()) == report.betti) break;
      Chain candidate;
      candidate.dim = dim;
      for (std::size_t i = 0; i < v.size(); ++i) candidate.add(here.cells[i], v[i]);
      try_add(candidate);
    }
    if (dim == 0) {
      for (const auto& c : here.cells) {
        if (static_cast<int>(report.generators.size()) == report.betti) break;
        Chain candidate;
        candidate.add(c, 1);
        try_add(candidate);
      }
    }
  }
  return report;
}

Chain axis_generator_A(const GridComplex& complex) {
  unsigned mask = 0;
  for (int a = 0; a < complex.k(); ++a) mask |= 1u << a;
  return slice_chain(complex.lattice(), mask, complex.k());
}

Chain dual_axis_generator_B(const GridComplex& complex) {
  const auto dual = dual_lattice(complex);
  Chain chain;
  chain.grid = Grid::dual;
  chain.dim = complex.n() - complex.k();
  for (const auto& c : dual.cells(chain.dim)) {
    bool ok = true;
    for (int a = 0; a < complex.n() && ok; ++a) {
      if (a < complex.k()) {
        // Center of the middle primal interval.
        const int primal_interval = (complex.cells_along(a) - 1) / 2;
        ok = c.coord[a] == 2 * (primal_interval + 1);
      } else {
        ok = c.spans(a);
      }
    }
    if (ok) chain.add(c, 1);
  }
  return chain;
}

int intersection_parity(const GridComplex& complex, const Chain& sigma_a, const Chain& sigma_b) {
  const int n = complex.n();
  const int k = complex.k();
  if (sigma_a.grid != Grid::primal || sigma_a.dim != k) throw InvalidInput("sigma_A must be a primal k-chain");
  if (sigma_b.grid != Grid::dual || sigma_b.dim != n - k) throw InvalidInput("sigma_B must be a dual (n-k)-chain");
  if (!is_relative_cycle(complex, sigma_a, Side::A)) throw InvalidInput("sigma_A is not a relative cycle mod A");
  if (!is_relative_cycle(complex, sigma_b, Side::B)) throw InvalidInput("sigma_B is not a relative cycle mod B");
  const auto dual = dual_lattice(complex);
  for (const auto& [cell, c] : sigma_b.coeffs) {
    if (dual.touches_A(cell)) throw InvalidInput("sigma_B meets the cells touching A; chains not in dual position");
  }
  std::int64_t count = 0;
  for (const auto& [cell, c] : sigma_a.coeffs) {
    CellId partner = cell;
    for (int a = 0; a < n; ++a) partner.coord[a] += 1;
    auto it = sigma_b.coeffs.find(partner);
    if (it != sigma_b.coeffs.end()) count += (c % 2) * (it->second % 2);
  }
  return static_cast<int>(((count % 2) + 2) % 2);
}

std::vector<CellId> refine_cells(const std::vector<CellId>& primal) {
  std::vector<CellId> out;
  for (const auto& cell : primal) {
    std::vector<CellId> acc{cell};
    for (int a = 0; a < kMaxDim; ++a) {
      std::vector<CellId> next;
      for (auto c : acc) {
        if (cell.spans(a)) {
          for (int d : {-1, 1}) {
            CellId s = c;
            s.coord[a] = 2 * cell.coord[a] + d;
            next.push_back(s);
          }
        } else {
          c.coord[a] = 2 * cell.coord[a];
          next.push_back(c);
        }
      }
      acc.swap(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  return out;
}

bool is_in_star_family(const GridComplex& complex, const std::vector<CellId>& refined_faces) {
  const auto lat = refined_lattice(complex);
  if (lat.total_cells() > kHomologyCellLimit) {
    throw LimitExceeded("refined complex has " + std::to_string(lat.total_cells()) + " cells; limit is " +
                        std::to_string(kHomologyCellLimit));
  }
  std::unordered_set<CellId, CellIdHash> blocked;
  for (const auto& f : refined_faces) {
    if (!lat.contains(f)) throw InvalidInput("face " + to_string(f) + " is not on the refined lattice");
    if (lat.in_A(f)) throw InvalidInput("candidate set meets A");
    for (const auto& v : lat.closure_vertices(f)) blocked.insert(v);
  }
  auto avoids = [&](const CellId& c) {
    for (const auto& v : lat.closure_vertices(c)) {
      if (blocked.count(v)) return false;
    }
    return true;
  };
  const int k = complex.k();
  const auto rows = relative_cells(lat, Side::A, k - 1, avoids);
  const auto cols = relative_cells(lat, Side::A, k, avoids);
  if (cols.cells.empty()) return true;
  SparseIntMatrix mat = boundary_matrix(lat, rows, cols);
  const std::size_t base_rank = rank_mod_p(mat);

  // Degree functional: flux through the slice at a fixed interior A position.
  std::array<int, kMaxDim> a_star{};
  for (int a = 0; a < k; ++a) a_star[a] = 2 * (lat.extent(a) / 2) + 1;
  const int phi_row = mat.rows;
  mat.rows += 1;
  bool any = false;
  for (std::size_t j = 0; j < cols.cells.size(); ++j) {
    const auto& c = cols.cells[j];
    bool hit = true;
    for (int a = 0; a < complex.n() && hit; ++a) {
      hit = a < k ? c.coord[a] == a_star[a] : !c.spans(a);
    }
    if (hit) {
      mat.add(phi_row, static_cast<int>(j), 1);
      any = true;
    }
  }
  if (!any) return true;
  return rank_mod_p(mat) == base_rank;
}

}  // namespace pmod
