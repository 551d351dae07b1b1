#include "pmod/lattice.hpp"

#include <sstream>

#include "pmod/error.hpp"

namespace pmod {

std::string to_string(const CellId& id) {
  std::ostringstream os;
  os << '(';
  for (int a = 0; a < kMaxDim; ++a) {
    if (a) os << ',';
    os << id.coord[a];
  }
  os << ')';
  return os.str();
}

CubicalLattice::CubicalLattice(int n, int k, std::array<int, kMaxDim> extent)
    : n_(n), k_(k), extent_(extent) {
  if (n < 1 || n > kMaxDim) throw InvalidInput("lattice dimension out of range");
  if (k < 0 || k > n) throw InvalidInput("lattice split index out of range");
  std::size_t total = 1;
  for (int a = n - 1; a >= 0; --a) {
    if (extent_[a] < 1) throw InvalidInput("lattice extent must be positive");
    stride_[a] = total;
    total *= static_cast<std::size_t>(2 * extent_[a] + 1);
  }
  for (int a = n; a < kMaxDim; ++a) extent_[a] = 0;
  lookup_.assign(total, -1);

  CellId id;
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rest = lin;
    for (int a = 0; a < n; ++a) {
      id.coord[a] = static_cast<std::int32_t>(rest / stride_[a]);
      rest %= stride_[a];
    }
    auto& bucket = cells_[id.dim()];
    lookup_[lin] = static_cast<std::int32_t>(bucket.size());
    bucket.push_back(id);
  }
}

std::size_t CubicalLattice::total_cells() const {
  std::size_t t = 0;
  for (int d = 0; d <= n_; ++d) t += cells_[d].size();
  return t;
}

bool CubicalLattice::contains(const CellId& id) const {
  for (int a = 0; a < kMaxDim; ++a) {
    if (a < n_) {
      if (id.coord[a] < 0 || id.coord[a] > 2 * extent_[a]) return false;
    } else if (id.coord[a] != 0) {
      return false;
    }
  }
  return true;
}

std::size_t CubicalLattice::linear(const CellId& id) const {
  std::size_t lin = 0;
  for (int a = 0; a < n_; ++a) lin += stride_[a] * static_cast<std::size_t>(id.coord[a]);
  return lin;
}

std::int64_t CubicalLattice::index_of(const CellId& id) const {
  if (!contains(id)) return -1;
  return lookup_[linear(id)];
}

std::vector<Facet> CubicalLattice::facets(const CellId& id) const {
  std::vector<Facet> out;
  int position = 0;
  for (int a = 0; a < n_; ++a) {
    if (!id.spans(a)) continue;
    const int s = (position % 2 == 0) ? 1 : -1;
    CellId lo = id;
    CellId hi = id;
    lo.coord[a] -= 1;
    hi.coord[a] += 1;
    out.push_back({lo, -s});
    out.push_back({hi, s});
    ++position;
  }
  return out;
}

std::vector<CellId> CubicalLattice::incident_top_cells(const CellId& id) const {
  std::vector<CellId> out{id};
  for (int a = 0; a < n_; ++a) {
    if (id.spans(a)) continue;
    std::vector<CellId> next;
    for (const auto& c : out) {
      for (int d : {-1, 1}) {
        CellId nb = c;
        nb.coord[a] += d;
        if (nb.coord[a] >= 0 && nb.coord[a] <= 2 * extent_[a]) next.push_back(nb);
      }
    }
    out.swap(next);
  }
  return out;
}

std::vector<CellId> CubicalLattice::closure_vertices(const CellId& id) const {
  std::vector<CellId> out{id};
  for (int a = 0; a < n_; ++a) {
    if (!id.spans(a)) continue;
    std::vector<CellId> next;
    next.reserve(out.size() * 2);
    for (const auto& c : out) {
      for (int d : {-1, 1}) {
        CellId v = c;
        v.coord[a] += d;
        next.push_back(v);
      }
    }
    out.swap(next);
  }
  return out;
}

bool CubicalLattice::in_A(const CellId& id) const {
  for (int a = 0; a < k_; ++a) {
    if (id.coord[a] == 0 || id.coord[a] == 2 * extent_[a]) return true;
  }
  return false;
}

bool CubicalLattice::in_B(const CellId& id) const {
  for (int a = k_; a < n_; ++a) {
    if (id.coord[a] == 0 || id.coord[a] == 2 * extent_[a]) return true;
  }
  return false;
}

bool CubicalLattice::in(Side side, const CellId& id) const {
  switch (side) {
    case Side::A: return in_A(id);
    case Side::B: return in_B(id);
    case Side::none: return false;
  }
  return false;
}

bool CubicalLattice::touches_A(const CellId& id) const {
  for (int a = 0; a < k_; ++a) {
    if (id.coord[a] <= 1 || id.coord[a] >= 2 * extent_[a] - 1) return true;
  }
  return false;
}

bool CubicalLattice::touches_B(const CellId& id) const {
  for (int a = k_; a < n_; ++a) {
    if (id.coord[a] <= 1 || id.coord[a] >= 2 * extent_[a] - 1) return true;
  }
  return false;
}

bool CubicalLattice::touches(Side side, const CellId& id) const {
  switch (side) {
    case Side::A: return touches_A(id);
    case Side::B: return touches_B(id);
    case Side::none: return false;
  }
  return false;
}

}  // namespace pmod
