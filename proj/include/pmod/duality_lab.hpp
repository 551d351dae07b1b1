#pragma once

// End-to-end experiments: both moduli and their product, closed-form
// comparison, the dual-density step, mollifier margins, translate/blocker
// intersections, homology sanity and the capacity pathway.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmod/capacity.hpp"
#include "pmod/families.hpp"
#include "pmod/grid_complex.hpp"
#include "pmod/homology.hpp"
#include "pmod/mollifier.hpp"
#include "pmod/modulus_solver.hpp"

namespace pmod {

inline constexpr const char* kConfigSchema = "pmod-experiment/1";

struct MollifierSettings {
  double epsilon = 0.1;
  int order = kDefaultMollifierOrder;
  double margin = 0.2;
  int samples = 20;
  KernelProfile kernel = KernelProfile::bump;
};

struct ExperimentConfig {
  BoxSpec box;
  double p = 2.0;
  FamilyMode families = FamilyMode::axis_restricted;
  std::vector<int> resolutions{4};
  std::set<std::string> checks{"product"};
  std::uint64_t seed = 1;
  SolverConfig solver;
  double delta_margin = 0.0;
  // Allowed excess of the duality product over 1; defaults to 1e-6 for axis
  // families and 0.05 for full families.
  std::optional<double> product_slack;
  double dual_tolerance = 0.02;
  MollifierSettings mollifier;
  FamilySide modulus_side = FamilySide::A;

  double q() const { return p / (p - 1.0); }
  double slack() const;
  // Throws InvalidInput on any violated invariant.
  void validate() const;
  BoxSpec box_at(int m) const;
};

inline const std::set<std::string>& known_checks() {
  static const std::set<std::string> names{"product", "dual-density", "mollifier", "intersection",
                                           "homology", "capacity", "star"};
  return names;
}

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json default_config_json();

struct CheckOutcome {
  std::string name;
  bool passed = true;
  bool asserted = true;  // false: informational only
  bool skipped = false;
  double value = 0.0;
  std::string detail;
};

struct ResolutionRecord {
  int m = 0;
  double p = 2.0;
  double q = 2.0;
  double mod_a = 0.0;
  double mod_b = 0.0;
  double product = 0.0;
  std::optional<double> exact_a;
  std::optional<double> exact_b;
  ModulusResult result_a;
  ModulusResult result_b;
  std::vector<CheckOutcome> checks;
  std::string verdict;
};

struct DualityReport {
  ExperimentConfig config;
  std::vector<ResolutionRecord> records;

  bool bound_violated() const;
  bool all_passed() const;
};

// Closed forms for product boxes.
double exact_modulus_a(const BoxSpec& box, double p);
double exact_modulus_b(const BoxSpec& box, double q);

DualityReport run_duality(const ExperimentConfig& config);

// Min Gamma_A weight of rho_B^{q-1} / mod_q.
double dual_density_check(const GridComplex& complex, const ModulusResult& result_b, const FamilyHandle& family_a,
                          double q);

// Seeded log-normal densities.
std::vector<DensityField> random_densities(const GridComplex& complex, int count, std::uint64_t seed);

// Axis Gamma_B members (undeformed boxes) keeping `margin` from A, plus the
// blocking-family oracle member for each random density.
std::vector<SliceMember> star_sample(const GridComplex& complex, double margin, int count, std::uint64_t seed);

struct IntersectionScanReport {
  std::size_t members = 0;
  std::size_t translates = 0;
  std::size_t stars = 0;
  std::size_t pairs = 0;
  std::size_t misses = 0;
  std::vector<std::string> counterexamples;
};

// Every margin-filtered axis Gamma_A member, every lattice translate allowed
// by translate_member, against every sampled blocker.
IntersectionScanReport intersection_scan(const GridComplex& complex, double margin, int samples, std::uint64_t seed);

struct StarComparison {
  double star = 0.0;  // mod_q of the blocking family
  double b = 0.0;     // mod_q of Gamma_B (axis on undeformed boxes, else full)
  double gap = 0.0;   // star - b
};

StarComparison star_vs_B_comparison(const GridComplex& complex, double q, const SolverConfig& solver);

struct MollifierCheck {
  MarginReport margin;
  std::size_t sample_size = 0;
};

MollifierCheck mollifier_check(const GridComplex& complex, const MollifierSettings& settings, std::uint64_t seed);

struct HomologyCheck {
  HomologyReport a;  // H_k(Q, A)
  HomologyReport b;  // H_{n-k}(Q, B)
  int parity = 0;
  std::size_t members_checked = 0;
  std::size_t members_in_star = 0;
};

HomologyCheck homology_check(const GridComplex& complex, int samples, std::uint64_t seed);

nlohmann::json to_json(const ModulusResult& result);
nlohmann::json to_json(const DualityReport& report);

}  // namespace pmod
