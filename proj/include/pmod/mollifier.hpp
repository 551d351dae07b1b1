#pragma once

// Smoothed surface measures: phi_eps^S(x) = integral over S of phi_eps(x - y).
// Geometry is taken in reference coordinates; deformed grids are refused.

#include <Eigen/Core>
#include <string>
#include <vector>

#include "pmod/families.hpp"
#include "pmod/grid_complex.hpp"

namespace pmod {

enum class KernelProfile { bump, indicator };

std::string to_string(KernelProfile profile);
KernelProfile kernel_profile_from_string(const std::string& name);

struct Kernel {
  int n = 2;
  double epsilon = 0.1;
  double normalization = 1.0;  // c_n: makes the unit-ball integral 1
  KernelProfile profile = KernelProfile::bump;
};

// c_n for the profile exp(-1/(1-|x|^2)) (bump) or the unit-ball indicator.
double kernel_normalization(int n, KernelProfile profile);

Kernel make_kernel(int n, double epsilon, KernelProfile profile = KernelProfile::bump);

double kernel_eval(const Kernel& kernel, const Point& x);

inline constexpr int kDefaultMollifierOrder = 4;
inline constexpr int kOracleMollifierOrder = 8;

// Axis-aligned piece of a member: a box spanning the axes in `mask`, fixed
// coordinate elsewhere, with an integration weight per unit H^dim.
struct MemberPiece {
  Point lo{};
  Point hi{};
  unsigned mask = 0;
  double density = 1.0;
};

std::vector<MemberPiece> member_pieces(const GridComplex& complex, const SliceMember& member);

// Tensor Gauss quadrature of phi_eps(x - y) over the member's pieces.
double convolve_surface(const GridComplex& complex, const SliceMember& member, const Kernel& kernel, const Point& x,
                        int order = kDefaultMollifierOrder);

struct MarginReport {
  double margin = 0.0;         // min over the sample
  std::size_t argmin = 0;
  std::vector<double> values;  // per sampled member
};

// Discrete integral of phi_eps^S over each S* of the sample. Requires
// epsilon < delta_margin and every S* at distance >= delta_margin from A
// (InvalidInput otherwise, unless `enforce` is false).
MarginReport admissibility_margin(const GridComplex& complex, const SliceMember& s, const Kernel& kernel,
                                  const std::vector<SliceMember>& sample, double delta_margin,
                                  int order = kDefaultMollifierOrder, bool enforce = true);

// Midpoint sum of phi_eps^S over the n-cells (total-mass check).
double mollified_mass(const GridComplex& complex, const SliceMember& s, const Kernel& kernel,
                      int order = kDefaultMollifierOrder);

// |det [E*, -E]| for orthonormal bases E*, E of the column spans of the two
// tangent matrices (n x (n-k) and n x k). At most 1.
double coarea_factor(const Eigen::MatrixXd& tangent_star, const Eigen::MatrixXd& tangent);

}  // namespace pmod
