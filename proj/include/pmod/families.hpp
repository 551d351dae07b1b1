#pragma once

// Slice families and their members.
//
// Side A members are k-dimensional and connect the two halves of A; side B
// members are (n-k)-dimensional. A_star is the blocking family of sets whose
// removal kills H_k(Q, A); the cut/path members realize it.
//
// A member is either a stack of fibers (straight coordinate slabs through
// n-cell centers, used for the product computation) or a set of grid faces.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmod/grid_complex.hpp"
#include "pmod/homology.hpp"

namespace pmod {

enum class FamilySide { A, B, A_star };
enum class FamilyMode { axis_restricted, full };

std::string to_string(FamilySide side);
std::string to_string(FamilyMode mode);
FamilySide family_side_from_string(const std::string& name);
FamilyMode family_mode_from_string(const std::string& name);

struct FamilyHandle {
  FamilySide side = FamilySide::A;
  FamilyMode mode = FamilyMode::axis_restricted;
  // Members closer than this to the excluded boundary are dropped (B for side
  // A, A otherwise).
  double delta_margin = 0.0;

  // Throws InvalidInput unless 0 <= delta_margin < half the relevant side.
  void validate(const GridComplex& complex) const;
};

// Dimension of the members of a family.
int member_dim(const GridComplex& complex, FamilySide side);

enum class MemberKind { fiber, face_chain };

struct SliceMember {
  int dim = 0;
  MemberKind kind = MemberKind::face_chain;
  // fiber: the n-cells crossed; face_chain: the faces of the support.
  std::vector<CellId> cells;
  // Integration weight per entry (H^dim of the piece).
  std::vector<double> weights;
  // fiber only: axes the fiber spans.
  unsigned tangent_mask = 0;
  std::optional<Chain> chain;
  // False when an LP solution has non-integral coefficients; then weights
  // carry |x_f| and the member is a relaxation bound, not a set.
  bool integral = true;
  std::string origin;

  std::size_t size() const { return cells.size(); }
  double total_weight() const;
};

// N_{S,c}: contribution of top cell c to the member integral, so that
// member_weight = sum_c N_{S,c} rho_c. Sorted by cell index, no duplicates.
struct MemberCoefficients {
  std::vector<std::uint32_t> cells;
  std::vector<double> values;
};

MemberCoefficients member_coefficients(const GridComplex& complex, const SliceMember& member);

// Discrete integral of rho over the member. Throws InvalidInput on a size mismatch.
double member_weight(const GridComplex& complex, const SliceMember& member, const DensityField& rho);

// Straight fibers, one per transverse cell multi-index. Throws InvalidInput on
// deformed grids.
std::vector<SliceMember> axis_members(const GridComplex& complex, const FamilyHandle& handle);

// Cheapest grid-edge path between the two end planes of `axis`, avoiding the
// opposite side's boundary (and its delta_margin neighborhood).
SliceMember shortest_connecting_path(const GridComplex& complex, const DensityField& rho, int axis,
                                     double margin = 0.0);

// Cheapest face set separating the two end planes of `axis`; faces touching
// the side of `axis` or within `margin` of it are effectively forbidden.
SliceMember minimum_separating_cut(const GridComplex& complex, const DensityField& rho, int axis,
                                   double margin = 0.0);

// k = 1 forms: path between A0 and A1 avoiding B; cut separating A0 from A1.
SliceMember min_weight_path(const GridComplex& complex, const DensityField& rho, double margin = 0.0);
SliceMember min_weight_cut(const GridComplex& complex, const DensityField& rho, double margin = 0.0);

inline constexpr std::size_t kChainLpCellLimit = 5000;

// LP relaxation over real chains homologous to the axis generator of the side,
// supported away from the opposite boundary. `lp_value` receives the optimum.
SliceMember min_weight_chain_lp(const GridComplex& complex, const DensityField& rho, const FamilyHandle& handle,
                                double* lp_value = nullptr);

// Shift by z lattice steps. Requires |z| * spacing < delta_margin / 10 (z = 0
// always allowed) and the translate inside Q; throws InvalidInput otherwise.
SliceMember translate_member(const GridComplex& complex, const SliceMember& member,
                             const std::array<int, kMaxDim>& z, double delta_margin);

// Closed support of the member as cells of refined_lattice(complex).
std::vector<CellId> refined_support(const GridComplex& complex, const SliceMember& member);

// Closed supports share a point.
bool members_intersect(const GridComplex& complex, const SliceMember& a, const SliceMember& b);

// Which oracle answers min_weight_member for this family: "axis-scan", "path",
// "cut", "chain-lp", or "" when none is available.
std::string oracle_name(const GridComplex& complex, const FamilyHandle& handle);

// Minimum-weight member of the family at rho; nullopt for an empty family.
// Throws InvalidInput when no oracle exists for (n, k, side, mode).
std::optional<SliceMember> min_weight_member(const GridComplex& complex, const DensityField& rho,
                                             const FamilyHandle& handle);

}  // namespace pmod
