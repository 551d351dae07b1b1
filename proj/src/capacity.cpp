#include "pmod/capacity.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pmod/error.hpp"

namespace pmod {

namespace {

// Per top cell: corner vertex indices and the n x 2^n physical gradient operator.
struct CellStencil {
  std::vector<std::array<std::size_t, 16>> corners;
  std::vector<Eigen::MatrixXd> grad;
  int n = 0;
  int num_corners = 0;
};

CellStencil build_stencil(const GridComplex& complex) {
  CellStencil st;
  const int n = complex.n();
  st.n = n;
  st.num_corners = 1 << n;
  const auto& lat = complex.lattice();
  const double h = complex.spacing();
  const auto& tops = complex.cells(n);
  st.corners.resize(tops.size());
  st.grad.resize(tops.size());
  for (std::size_t c = 0; c < tops.size(); ++c) {
    for (int mask = 0; mask < st.num_corners; ++mask) {
      CellId v = tops[c];
      for (int a = 0; a < n; ++a) v.coord[a] += ((mask >> a) & 1) ? 1 : -1;
      st.corners[c][mask] = static_cast<std::size_t>(lat.index_of(v));
    }
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(n, st.num_corners);
    const double share = 1.0 / static_cast<double>(st.num_corners / 2) / h;
    for (int a = 0; a < n; ++a) {
      for (int mask = 0; mask < st.num_corners; ++mask) ref(a, mask) += ((mask >> a) & 1) ? share : -share;
    }
    if (complex.spec().deformation.is_identity()) {
      st.grad[c] = ref;
    } else {
      const Eigen::MatrixXd jac = complex.jacobian(complex.center(tops[c]));
      st.grad[c] = jac.transpose().inverse() * ref;
    }
  }
  return st;
}

Eigen::VectorXd local_values(const CellStencil& st, std::size_t c, const std::vector<double>& u) {
  Eigen::VectorXd v(st.num_corners);
  for (int i = 0; i < st.num_corners; ++i) v[i] = u[st.corners[c][i]];
  return v;
}

double stencil_energy(const GridComplex& complex, const CellStencil& st, const std::vector<double>& u, double p) {
  double e = 0.0;
  for (std::size_t c = 0; c < st.grad.size(); ++c) {
    const double norm = (st.grad[c] * local_values(st, c, u)).norm();
    if (norm > 0.0) e += complex.measure(st.n, c) * std::pow(norm, p);
  }
  return e;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void require_k1(const GridComplex& complex) {
  if (complex.k() != 1) throw InvalidInput("capacity requires k = 1");
}

}  // namespace

std::vector<std::array<double, kMaxDim>> cell_gradients(const GridComplex& complex, const PotentialField& u) {
  if (u.values.size() != complex.num_cells(0)) throw InvalidInput("potential does not match the complex");
  const auto st = build_stencil(complex);
  std::vector<std::array<double, kMaxDim>> out(st.grad.size());
  for (std::size_t c = 0; c < st.grad.size(); ++c) {
    const Eigen::VectorXd g = st.grad[c] * local_values(st, c, u.values);
    for (int a = 0; a < st.n; ++a) out[c][a] = g[a];
  }
  return out;
}

double dirichlet_energy(const GridComplex& complex, const PotentialField& u, double p) {
  if (u.values.size() != complex.num_cells(0)) throw InvalidInput("potential does not match the complex");
  return stencil_energy(complex, build_stencil(complex), u.values, p);
}

PotentialResult solve_p_laplace(const GridComplex& complex, double p, const CapacityConfig& config) {
  require_k1(complex);
  if (!(p >= kMinP && p <= kMaxP)) throw InvalidInput("p must lie in [1.05, 20]");
  const auto st = build_stencil(complex);
  const auto& vertices = complex.cells(0);
  const int last = 2 * complex.cells_along(0);

  std::vector<double> u(vertices.size());
  std::vector<int> free_index(vertices.size(), -1);
  int nfree = 0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int x = vertices[i].coord[0];
    u[i] = static_cast<double>(x) / last;
    if (x != 0 && x != last) free_index[i] = nfree++;
  }

  PotentialResult result;
  double e = stencil_energy(complex, st, u, p);
  const double delta2 = 1e-12;
  for (int it = 0; it < config.max_newton; ++it) {
    result.iterations = it + 1;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(nfree);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(st.grad.size() * st.num_corners * st.num_corners);
    for (std::size_t c = 0; c < st.grad.size(); ++c) {
      const auto& G = st.grad[c];
      const Eigen::VectorXd g = G * local_values(st, c, u);
      const double s = g.squaredNorm();
      const double sigma = complex.measure(st.n, c);
      const double sd = s + delta2;
      const Eigen::VectorXd lg = sigma * p * std::pow(s, 0.5 * (p - 2.0)) * (G.transpose() * g);
      const Eigen::VectorXd gG = G.transpose() * g;
      const Eigen::MatrixXd lh = sigma * p * std::pow(sd, 0.5 * (p - 2.0)) *
                                 (G.transpose() * G + (p - 2.0) / sd * gG * gG.transpose());
      for (int i = 0; i < st.num_corners; ++i) {
        const int fi = free_index[st.corners[c][i]];
        if (fi < 0) continue;
        if (s > 0.0) grad[fi] += lg[i];
        for (int j = 0; j < st.num_corners; ++j) {
          const int fj = free_index[st.corners[c][j]];
          if (fj >= 0) trips.emplace_back(fi, fj, lh(i, j));
        }
      }
    }
    Eigen::SparseMatrix<double> hess(nfree, nfree);
    hess.setFromTriplets(trips.begin(), trips.end());
    double max_diag = 0.0;
    for (int i = 0; i < nfree; ++i) max_diag = std::max(max_diag, hess.coeff(i, i));
    const double shift = 1e-12 * std::max(max_diag, 1e-300);
    for (int i = 0; i < nfree; ++i) hess.coeffRef(i, i) += shift;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(hess);
    if (ldlt.info() != Eigen::Success) throw InternalError("p-Laplace Hessian factorization failed");
    const Eigen::VectorXd dir = -ldlt.solve(grad);
    const double slope = grad.dot(dir);
    if (!(slope < 0.0) || std::abs(slope) <= 1e-15 * std::max(e, 1e-300)) {
      result.converged = true;
      break;
    }
    double t = 1.0;
    std::vector<double> trial(u.size());
    double e_new = e;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = u;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (free_index[i] >= 0) trial[i] += t * dir[free_index[i]];
      }
      e_new = stencil_energy(complex, st, trial, p);
      if (e_new <= e + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No further decrease representable in floating point.
      result.converged = true;
      break;
    }
    const double decrease = (e - e_new) / std::max(e, 1e-300);
    u.swap(trial);
    e = e_new;
    if (decrease < config.tol_decrease) {
      result.converged = true;
      break;
    }
  }
  result.u.values = std::move(u);
  result.energy = e;
  return result;
}

std::vector<double> cell_levels(const GridComplex& complex, const PotentialField& u, std::uint64_t seed) {
  if (u.values.size() != complex.num_cells(0)) throw InvalidInput("potential does not match the complex");
  const auto& lat = complex.lattice();
  const auto& tops = complex.cells(complex.n());
  std::vector<double> out(tops.size());
  for (std::size_t c = 0; c < tops.size(); ++c) {
    const auto corners = lat.closure_vertices(tops[c]);
    double s = 0.0;
    for (const auto& v : corners) s += u.values[static_cast<std::size_t>(lat.index_of(v))];
    const double jitter = static_cast<double>(splitmix(seed ^ splitmix(c)) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    out[c] = s / static_cast<double>(corners.size()) + 1e-9 * jitter;
  }
  return out;
}

namespace {

// Calls f(face index, level on the low side, level on the high side) for every
// (n-1)-face perpendicular to axis 0 or interior; A0/A1 act as levels 0/1.
template <class F>
void for_each_level_face(const GridComplex& complex, const std::vector<double>& level, F&& f) {
  const int n = complex.n();
  const auto& lat = complex.lattice();
  const auto& faces = complex.cells(n - 1);
  const int last = 2 * complex.cells_along(0);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto inc = lat.incident_top_cells(faces[i]);
    if (inc.size() == 2) {
      f(i, level[complex.index(inc[0])], level[complex.index(inc[1])]);
    } else if (!faces[i].spans(0) && faces[i].coord[0] == 0) {
      f(i, 0.0, level[complex.index(inc[0])]);
    } else if (!faces[i].spans(0) && faces[i].coord[0] == last) {
      f(i, level[complex.index(inc[0])], 1.0);
    }
  }
}

}  // namespace

SliceMember level_set_member(const GridComplex& complex, const PotentialField& u, double t, std::uint64_t seed) {
  require_k1(complex);
  if (!(t > 0.0 && t < 1.0)) throw InvalidInput("level must lie in (0, 1)");
  const auto level = cell_levels(complex, u, seed);
  // Move t off every cell level.
  for (int attempt = 0;; ++attempt) {
    bool clash = false;
    for (double v : level) clash = clash || std::abs(v - t) < 1e-14;
    if (!clash) break;
    if (attempt == 16) throw InvalidInput("level collides with a cell value");
    t += 1e-13;
  }
  SliceMember m;
  m.dim = complex.n() - 1;
  m.kind = MemberKind::face_chain;
  m.origin = "level-set";
  const auto& faces = complex.cells(complex.n() - 1);
  for_each_level_face(complex, level, [&](std::size_t i, double a, double b) {
    if ((a < t) != (b < t)) {
      m.cells.push_back(faces[i]);
      m.weights.push_back(complex.measure(complex.n() - 1, i));
    }
  });
  return m;
}

double coarea_pairing(const GridComplex& complex, const PotentialField& u, const DensityField& rho, std::uint64_t seed) {
  require_k1(complex);
  const auto level = cell_levels(complex, u, seed);
  const auto& faces = complex.cells(complex.n() - 1);
  double total = 0.0;
  for_each_level_face(complex, level, [&](std::size_t i, double a, double b) {
    const double jump = std::abs(std::clamp(a, 0.0, 1.0) - std::clamp(b, 0.0, 1.0));
    total += face_density_value(complex, rho, faces[i]) * complex.measure(complex.n() - 1, i) * jump;
  });
  return total;
}

double gradient_pairing(const GridComplex& complex, const PotentialField& u, const DensityField& rho) {
  if (rho.size() != complex.num_top_cells()) throw InvalidInput("density does not match the complex");
  const auto grads = cell_gradients(complex, u);
  double total = 0.0;
  for (std::size_t c = 0; c < grads.size(); ++c) {
    double s = 0.0;
    for (int a = 0; a < complex.n(); ++a) s += grads[c][a] * grads[c][a];
    total += complex.measure(complex.n(), c) * rho.values[c] * std::sqrt(s);
  }
  return total;
}

CapacityReport capacity_modulus_report(const GridComplex& complex, double p, const SolverConfig& solver,
                                       const CapacityConfig& config, std::uint64_t seed) {
  require_k1(complex);
  CapacityReport rep;
  rep.p = p;
  rep.q = p / (p - 1.0);
  SolverConfig cp = solver;
  cp.p = p;
  const auto mod = solve_modulus(complex, FamilyHandle{FamilySide::A, FamilyMode::full, 0.0}, cp);
  const auto pot = solve_p_laplace(complex, p, config);
  SolverConfig cq = solver;
  cq.p = rep.q;
  const auto star = solve_modulus(complex, FamilyHandle{FamilySide::A_star, FamilyMode::full, 0.0}, cq);

  rep.modulus = mod.value;
  rep.capacity = pot.energy;
  rep.relative_gap = std::abs(rep.capacity - rep.modulus) / std::max(rep.modulus, 1e-300);
  rep.star_modulus = star.value;
  rep.lower_product = std::pow(rep.capacity, 1.0 / p) * std::pow(rep.star_modulus, 1.0 / rep.q);
  rep.modulus_product = std::pow(rep.modulus, 1.0 / p) * std::pow(rep.star_modulus, 1.0 / rep.q);
  rep.coarea = coarea_pairing(complex, pot.u, star.rho, seed);
  rep.gradient = gradient_pairing(complex, pot.u, star.rho);
  rep.holder_bound = std::pow(rep.capacity, 1.0 / p) * std::pow(energy(complex, star.rho, rep.q), 1.0 / rep.q);
  rep.min_level_weight = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 20; ++i) {
    const auto member = level_set_member(complex, pot.u, i / 20.0, seed);
    rep.min_level_weight = std::min(rep.min_level_weight, member_weight(complex, member, star.rho));
  }
  rep.potential_converged = pot.converged;
  rep.solves_converged = mod.converged && star.converged;
  return rep;
}

ProjectionCheck projection_capacity_check(const GridComplex& complex, double p, FamilyMode mode) {
  if (!complex.spec().deformation.is_identity()) throw InvalidInput("projection check needs an undeformed box");
  double vol1 = 1.0, vol2 = 1.0;
  for (int a = 0; a < complex.n(); ++a) (a < complex.k() ? vol1 : vol2) *= complex.side(a);
  const DensityField jac = DensityField::constant(complex.num_top_cells(), 1.0 / vol1);
  ProjectionCheck out;
  out.energy = energy(complex, jac, p);
  const auto member = min_weight_member(complex, jac, FamilyHandle{FamilySide::A, mode, 0.0});
  out.min_weight = member ? member_weight(complex, *member, jac) : std::numeric_limits<double>::infinity();
  out.exact = vol2 / std::pow(vol1, p - 1.0);
  return out;
}

}  // namespace pmod
