#pragma once

// Discrete p-modulus by cutting planes:
//   minimize  sum_c sigma_c rho_c^p  subject to  N_S . rho >= 1 for members S.
// Violated members come from an oracle; the relaxed problem over the active
// cuts is solved in the dual, where rho_c = (g_c / (p sigma_c))^{1/(p-1)} with
// g = sum_S lambda_S N_S.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmod/families.hpp"
#include "pmod/grid_complex.hpp"

namespace pmod {

enum class InnerMethod { dual_ascent, projected_gradient };

std::string to_string(InnerMethod method);
InnerMethod inner_method_from_string(const std::string& name);

inline constexpr double kMinP = 1.05;
inline constexpr double kMaxP = 20.0;
inline constexpr double kDensityFloor = 1e-30;

struct SolverConfig {
  double p = 2.0;
  double tol_feasibility = 1e-6;
  double tol_gap = 1e-7;
  int max_cuts = 10000;
  InnerMethod inner = InnerMethod::dual_ascent;
  int inner_max_sweeps = 200000;

  void validate() const;
};

// Source of the minimum-weight member at a density.
class MemberSource {
 public:
  virtual ~MemberSource() = default;
  // nullopt when the family is empty.
  virtual std::optional<SliceMember> min_member(const DensityField& rho) const = 0;
};

// Oracle-backed family.
class FamilySource : public MemberSource {
 public:
  FamilySource(const GridComplex& complex, FamilyHandle handle) : complex_(complex), handle_(handle) {}
  std::optional<SliceMember> min_member(const DensityField& rho) const override;

 private:
  const GridComplex& complex_;
  FamilyHandle handle_;
};

// Finite explicit family; ties go to the earliest member.
class ExplicitSource : public MemberSource {
 public:
  ExplicitSource(const GridComplex& complex, std::vector<SliceMember> members);
  std::optional<SliceMember> min_member(const DensityField& rho) const override;
  const std::vector<SliceMember>& members() const { return members_; }

 private:
  const GridComplex& complex_;
  std::vector<SliceMember> members_;
};

struct ActiveMember {
  SliceMember member;
  double multiplier = 0.0;
};

struct IterationRecord {
  int iteration = 0;
  int cuts = 0;
  double lower = 0.0;
  double upper = 0.0;
  double min_weight = 0.0;
};

struct ModulusResult {
  double value = 0.0;
  DensityField rho;
  std::vector<ActiveMember> active;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double min_weight = 0.0;  // oracle minimum of the returned rho
  std::vector<IterationRecord> iterations;
  bool converged = false;
  bool max_cuts_exceeded = false;
  bool inner_nonconvergent = false;

  double relative_gap() const;
};

// sum_c measure(c) rho_c^p.
double energy(const GridComplex& complex, const DensityField& rho, double p);

ModulusResult solve_modulus(const GridComplex& complex, const MemberSource& family, const SolverConfig& config);
ModulusResult solve_modulus(const GridComplex& complex, const FamilyHandle& family, const SolverConfig& config);

// rho divided by its minimum member weight. Throws InvalidInput when that
// weight is zero; an empty family returns rho unchanged.
DensityField rescale_to_feasible(const GridComplex& complex, const DensityField& rho, const MemberSource& family);

// Certificates recomputed from scratch, independent of the solve path.
struct CertificateCheck {
  double primal_energy = 0.0;   // energy of result.rho
  double primal_min_weight = 0.0;
  double dual_value = 0.0;      // Lagrangian dual at the reported multipliers
  bool sandwich = false;        // dual_value <= primal bound, both within tolerance of the report
};

CertificateCheck check_certificates(const GridComplex& complex, const MemberSource& family,
                                    const ModulusResult& result, const SolverConfig& config);

}  // namespace pmod
