#pragma once

// p-capacity of the condenser (Q; A0, A1) for k = 1 and its relation to the
// path modulus. Potentials live on grid vertices; gradients are taken per top
// cell by averaging the edge differences along each axis.

#include <cstdint>
#include <vector>

#include "pmod/families.hpp"
#include "pmod/grid_complex.hpp"
#include "pmod/modulus_solver.hpp"

namespace pmod {

struct PotentialField {
  std::vector<double> values;  // indexed like GridComplex::cells(0)
};

struct CapacityConfig {
  int max_newton = 200;
  double tol_decrease = 1e-10;  // relative energy decrease at termination
};

struct PotentialResult {
  PotentialField u;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Physical gradient of u on each top cell (n entries per cell).
std::vector<std::array<double, kMaxDim>> cell_gradients(const GridComplex& complex, const PotentialField& u);

// sum_c measure(c) |grad u|_c^p.
double dirichlet_energy(const GridComplex& complex, const PotentialField& u, double p);

// Minimizes the discrete p-Dirichlet energy with u = 0 on A0, u = 1 on A1 by
// damped Newton. Throws InvalidInput unless k = 1 and p in [1.05, 20].
PotentialResult solve_p_laplace(const GridComplex& complex, double p, const CapacityConfig& config = {});

// Cell value of u: mean over the cell's corners, with A0/A1 acting as virtual
// neighbors of value 0/1. The 1e-9 perturbation is seeded.
std::vector<double> cell_levels(const GridComplex& complex, const PotentialField& u, std::uint64_t seed);

// Faces separating {level < t} from {level >= t}, including faces on A0/A1.
// Throws InvalidInput for t outside (0, 1).
SliceMember level_set_member(const GridComplex& complex, const PotentialField& u, double t, std::uint64_t seed = 0);

// integral over t in (0,1) of the rho-weight of the level sets, in closed form:
// sum over separating faces of face weight times the level jump.
double coarea_pairing(const GridComplex& complex, const PotentialField& u, const DensityField& rho,
                      std::uint64_t seed = 0);

// sum_c measure(c) rho_c |grad u|_c.
double gradient_pairing(const GridComplex& complex, const PotentialField& u, const DensityField& rho);

struct CapacityReport {
  double p = 2.0;
  double q = 2.0;
  double modulus = 0.0;        // mod_p of the full path family
  double capacity = 0.0;
  double relative_gap = 0.0;   // |cap - mod| / mod
  double star_modulus = 0.0;   // mod_q of the separating-set family
  double lower_product = 0.0;  // cap^{1/p} (mod_q star)^{1/q}
  double modulus_product = 0.0;  // mod^{1/p} (mod_q star)^{1/q}
  double coarea = 0.0;         // level-set integral of rho* over t
  double gradient = 0.0;       // sum rho* |grad u|
  double holder_bound = 0.0;   // cap^{1/p} * E_q(rho*)^{1/q}
  double min_level_weight = 0.0;  // smallest rho*-weight among sampled level sets
  bool potential_converged = false;
  bool solves_converged = false;
};

CapacityReport capacity_modulus_report(const GridComplex& complex, double p, const SolverConfig& solver,
                                       const CapacityConfig& config = {}, std::uint64_t seed = 0);

// The projection map onto Q1 scaled to unit volume: its Jacobian
// H^k(Q1)^{-1} as a density, checked against the Gamma_A oracle.
struct ProjectionCheck {
  double energy = 0.0;       // energy of the Jacobian density
  double min_weight = 0.0;   // oracle minimum over Gamma_A
  double exact = 0.0;        // H^{n-k}(Q2) / H^k(Q1)^{p-1}
};

ProjectionCheck projection_capacity_check(const GridComplex& complex, double p, FamilyMode mode);

}  // namespace pmod
