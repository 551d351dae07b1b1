#pragma once

// Helpers and brute-force references shared by the unit tests. Nothing here
// calls the library's oracles; geometry is rebuilt from doubled coordinates.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "pmod/grid_complex.hpp"

namespace testing_support {

using namespace pmod;

inline BoxSpec box(int n, int k, std::vector<double> q1, std::vector<double> q2, int m,
                   Deformation def = {}) {
  BoxSpec b;
  b.n = n;
  b.k = k;
  b.side_q1 = std::move(q1);
  b.side_q2 = std::move(q2);
  b.m = m;
  b.deformation = def;
  return b;
}

inline BoxSpec unit_square(int m) { return box(2, 1, {1.0}, {1.0}, m); }

inline DensityField random_density(const GridComplex& g, std::uint64_t seed, double lo = 0.2, double hi = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  DensityField rho;
  for (std::size_t i = 0; i < g.num_top_cells(); ++i) rho.values.push_back(u(rng));
  return rho;
}

// rho on the top cell with doubled coordinates c, looked up without the
// complex's index (row-major over odd coordinates).
inline double rho_at(const GridComplex& g, const DensityField& rho, const std::array<int, kMaxDim>& c) {
  std::size_t idx = 0;
  for (int a = 0; a < g.n(); ++a) idx = idx * g.cells_along(a) + static_cast<std::size_t>((c[a] - 1) / 2);
  return rho.values[idx];
}

// Mean density over the top cells whose closure contains the cell, times h^dim.
inline double face_cost(const GridComplex& g, const DensityField& rho, const std::array<int, kMaxDim>& cell) {
  std::vector<std::array<int, kMaxDim>> tops{cell};
  for (int a = 0; a < g.n(); ++a) {
    if (cell[a] % 2 != 0) continue;
    std::vector<std::array<int, kMaxDim>> next;
    for (auto t : tops) {
      for (int d : {-1, 1}) {
        auto u = t;
        u[a] += d;
        if (u[a] >= 1 && u[a] <= 2 * g.cells_along(a) - 1) next.push_back(u);
      }
    }
    tops.swap(next);
  }
  int dim = 0;
  for (int a = 0; a < g.n(); ++a) dim += cell[a] % 2;
  double sum = 0.0;
  for (const auto& t : tops) sum += rho_at(g, rho, t);
  return sum / tops.size() * std::pow(g.spacing(), dim);
}

// Cheapest simple grid path from the x0 = 0 plane to the x0 = N plane with
// every vertex off the planes of axes >= k (k = 1) and no edge inside an x0
// end plane. Exhaustive depth-first enumeration; small grids only.
inline double brute_force_path(const GridComplex& g, const DensityField& rho) {
  const int n = g.n();
  const int big = 2 * g.cells_along(0);
  auto usable = [&](const std::array<int, kMaxDim>& v) {
    for (int a = 1; a < n; ++a) {
      if (v[a] == 0 || v[a] == 2 * g.cells_along(a)) return false;
    }
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::array<int, kMaxDim>> stack;
  std::function<void(const std::array<int, kMaxDim>&, double)> dfs = [&](const std::array<int, kMaxDim>& v, double c) {
    if (c >= best) return;
    if (v[0] == big) {
      best = c;
      return;
    }
    for (int a = 0; a < n; ++a) {
      for (int d : {-2, 2}) {
        auto w = v;
        w[a] += d;
        if (w[a] < 0 || w[a] > 2 * g.cells_along(a) || !usable(w)) continue;
        if (a != 0 && (v[0] == 0 || v[0] == big)) continue;  // edge inside an end plane
        bool seen = false;
        for (const auto& s : stack) seen = seen || s == w;
        if (seen) continue;
        auto e = v;
        e[a] += d / 2;
        stack.push_back(w);
        dfs(w, c + face_cost(g, rho, e));
        stack.pop_back();
      }
    }
  };
  // Enumerate starting vertices on the x0 = 0 plane.
  std::array<int, kMaxDim> v{};
  std::function<void(int)> starts = [&](int a) {
    if (a == n) {
      if (!usable(v)) return;
      stack = {v};
      dfs(v, 0.0);
      return;
    }
    for (int t = 0; t <= 2 * g.cells_along(a); t += 2) {
      v[a] = t;
      starts(a + 1);
    }
  };
  v[0] = 0;
  starts(1);
  return best;
}

// Cheapest set of interior (n-1)-faces splitting the top cells into a part
// holding the first layer along `axis` and a part holding the last layer.
// Faces whose closure meets an end plane of an axis < k are not allowed.
// Exhaustive over the free cells.
inline double brute_force_cut(const GridComplex& g, const DensityField& rho, int axis) {
  const int n = g.n();
  const auto& tops = g.cells(n);
  const int last = 2 * g.cells_along(axis) - 1;
  std::vector<int> free_cells;
  for (std::size_t i = 0; i < tops.size(); ++i) {
    if (tops[i].coord[axis] != 1 && tops[i].coord[axis] != last) free_cells.push_back(static_cast<int>(i));
  }
  const bool a_side = axis < g.k();
  auto forbidden = [&](const std::array<int, kMaxDim>& f) {
    for (int a = 0; a < n; ++a) {
      if ((a < g.k()) != a_side) continue;
      if (f[a] <= 1 || f[a] >= 2 * g.cells_along(a) - 1) return true;
    }
    return false;
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> in(tops.size());
  for (std::size_t mask = 0; mask < (std::size_t(1) << free_cells.size()); ++mask) {
    for (std::size_t i = 0; i < tops.size(); ++i) in[i] = tops[i].coord[axis] == 1 ? 1 : 0;
    for (std::size_t b = 0; b < free_cells.size(); ++b) in[free_cells[b]] = (mask >> b) & 1u;
    double cost = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < tops.size() && ok; ++i) {
      for (int a = 0; a < n && ok; ++a) {
        auto nb = tops[i].coord;
        nb[a] += 2;
        if (nb[a] > 2 * g.cells_along(a) - 1) continue;
        std::size_t j = 0;
        while (tops[j].coord != nb) ++j;
        if (in[i] == in[j]) continue;
        auto f = tops[i].coord;
        f[a] += 1;
        if (forbidden(f)) ok = false;
        cost += face_cost(g, rho, f);
      }
    }
    if (ok) best = std::min(best, cost);
  }
  return best;
}

}  // namespace testing_support
