#include "pmod/modulus_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "pmod/error.hpp"

namespace pmod {

std::string to_string(InnerMethod method) {
  return method == InnerMethod::dual_ascent ? "dual-ascent" : "projected-gradient";
}

InnerMethod inner_method_from_string(const std::string& name) {
  if (name == "dual-ascent" || name == "dual_ascent") return InnerMethod::dual_ascent;
  if (name == "projected-gradient" || name == "projected_gradient") return InnerMethod::projected_gradient;
  throw InvalidInput("unknown inner method '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(p >= kMinP && p <= kMaxP)) throw InvalidInput("p must lie in [1.05, 20]");
  if (!(tol_feasibility > 0.0) || !(tol_gap > 0.0)) throw InvalidInput("solver tolerances must be positive");
  if (max_cuts < 1) throw InvalidInput("max_cuts must be positive");
  if (inner_max_sweeps < 1) throw InvalidInput("inner_max_sweeps must be positive");
}

std::optional<SliceMember> FamilySource::min_member(const DensityField& rho) const {
  return min_weight_member(complex_, rho, handle_);
}

ExplicitSource::ExplicitSource(const GridComplex& complex, std::vector<SliceMember> members)
    : complex_(complex), members_(std::move(members)) {}

std::optional<SliceMember> ExplicitSource::min_member(const DensityField& rho) const {
  if (members_.empty()) return std::nullopt;
  std::size_t best = 0;
  double best_w = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const double w = member_weight(complex_, members_[i], rho);
    if (w < best_w) {
      best_w = w;
      best = i;
    }
  }
  return members_[best];
}

double ModulusResult::relative_gap() const {
  return (upper_bound - lower_bound) / std::max(std::abs(lower_bound), 1e-300);
}

double energy(const GridComplex& complex, const DensityField& rho, double p) {
  if (!(p > 1.0)) throw InvalidInput("energy needs p > 1");
  if (rho.size() != complex.num_top_cells()) throw InvalidInput("density does not match the complex");
  const int n = complex.n();
  double s = 0.0;
  for (std::size_t c = 0; c < rho.size(); ++c) {
    if (rho.values[c] > 0.0) s += complex.measure(n, c) * std::pow(rho.values[c], p);
  }
  return s;
}

namespace {

struct Cut {
  SliceMember member;
  MemberCoefficients coeffs;
  double lambda = 0.0;
};

std::size_t member_key(const SliceMember& m) {
  std::vector<CellId> cells = m.cells;
  std::sort(cells.begin(), cells.end());
  std::size_t h = std::hash<int>()(static_cast<int>(m.kind)) ^ (m.tangent_mask * 0x9e3779b97f4a7c15ull);
  CellIdHash ch;
  for (const auto& c : cells) h = h * 1000003u ^ ch(c);
  for (double w : m.weights) h = h * 1000003u ^ std::hash<double>()(w);
  return h;
}

// The relaxed problem over the current cuts, solved in the dual.
class DualProblem {
 public:
  DualProblem(const GridComplex& complex, double p) : p_(p), sigma_(complex.num_top_cells()), g_(sigma_.size(), 0.0) {
    for (std::size_t c = 0; c < sigma_.size(); ++c) sigma_[c] = complex.measure(complex.n(), c);
    inv_pm1_ = 1.0 / (p - 1.0);
  }

  std::vector<Cut> cuts;

  double rho_at(std::size_t c, double g) const { return g > 0.0 ? std::pow(g / (p_ * sigma_[c]), inv_pm1_) : 0.0; }

  void rebuild_g() {
    std::fill(g_.begin(), g_.end(), 0.0);
    for (const auto& cut : cuts) {
      if (cut.lambda == 0.0) continue;
      for (std::size_t i = 0; i < cut.coeffs.cells.size(); ++i) g_[cut.coeffs.cells[i]] += cut.lambda * cut.coeffs.values[i];
    }
  }

  DensityField rho() const {
    DensityField out;
    out.values.resize(g_.size());
    for (std::size_t c = 0; c < g_.size(); ++c) out.values[c] = rho_at(c, g_[c]);
    return out;
  }

  double constraint_value(const Cut& cut) const {
    double s = 0.0;
    for (std::size_t i = 0; i < cut.coeffs.cells.size(); ++i) {
      const auto c = cut.coeffs.cells[i];
      s += cut.coeffs.values[i] * rho_at(c, g_[c]);
    }
    return s;
  }

  double dual_value() const {
    double sum_lambda = 0.0;
    for (const auto& cut : cuts) sum_lambda += cut.lambda;
    double e = 0.0;
    for (std::size_t c = 0; c < g_.size(); ++c) {
      const double r = rho_at(c, g_[c]);
      if (r > 0.0) e += sigma_[c] * std::pow(r, p_);
    }
    return sum_lambda - (p_ - 1.0) * e;
  }

  double violation() const {
    double worst = 0.0;
    for (const auto& cut : cuts) {
      const double f = constraint_value(cut);
      worst = std::max(worst, cut.lambda > 0.0 ? std::abs(f - 1.0) : std::max(0.0, 1.0 - f));
    }
    return worst;
  }

  // Exact maximization over one multiplier: N_S . rho(lambda) = 1 or lambda = 0.
  void coordinate_step(Cut& cut) {
    const auto& idx = cut.coeffs.cells;
    const auto& val = cut.coeffs.values;
    const std::size_t sz = idx.size();
    std::vector<double> base(sz);
    for (std::size_t i = 0; i < sz; ++i) base[i] = std::max(0.0, g_[idx[i]] - cut.lambda * val[i]);
    auto f = [&](double lam, double* deriv) {
      double s = 0.0, d = 0.0;
      for (std::size_t i = 0; i < sz; ++i) {
        const double g = base[i] + lam * val[i];
        const double r = rho_at(idx[i], g);
        s += val[i] * r;
        if (deriv) d += val[i] * val[i] * r * inv_pm1_ / std::max(g, kDensityFloor);
      }
      if (deriv) *deriv = d;
      return s;
    };
    double lam;
    if (f(0.0, nullptr) >= 1.0) {
      lam = 0.0;
    } else {
      double lo = 0.0;
      double hi = std::max(cut.lambda, 1e-12);
      while (f(hi, nullptr) < 1.0) {
        lo = hi;
        hi *= 4.0;
        if (hi > 1e300) throw InternalError("multiplier bracket diverged");
      }
      lam = cut.lambda > lo && cut.lambda < hi ? cut.lambda : 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        double d;
        const double v = f(lam, &d) - 1.0;
        if (v == 0.0) break;
        if (v < 0.0) lo = lam; else hi = lam;
        double next = d > 0.0 ? lam - v / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - lam) <= 1e-16 * std::max(1.0, lam) || hi - lo <= 1e-16 * hi) {
          lam = next;
          break;
        }
        lam = next;
      }
    }
    for (std::size_t i = 0; i < sz; ++i) g_[idx[i]] = base[i] + lam * val[i];
    cut.lambda = lam;
  }

  // Returns true on convergence to `tol` in constraint residual.
  bool solve_dual_ascent(double tol, int max_sweeps) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      for (auto& cut : cuts) coordinate_step(cut);
      if (sweep % 64 == 63) rebuild_g();
      if (violation() <= tol) {
        rebuild_g();
        if (violation() <= tol) return true;
      }
    }
    rebuild_g();
    return violation() <= tol;
  }

  bool solve_projected_gradient(double tol, int max_iters) {
    rebuild_g();
    double step = 1.0;
    double value = dual_value();
    for (int it = 0; it < max_iters; ++it) {
      std::vector<double> grad(cuts.size());
      for (std::size_t i = 0; i < cuts.size(); ++i) grad[i] = 1.0 - constraint_value(cuts[i]);
      double pg = 0.0;
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double moved = std::max(0.0, cuts[i].lambda + grad[i]) - cuts[i].lambda;
        pg = std::max(pg, std::abs(moved));
      }
      if (violation() <= tol) return true;
      (void)pg;
      const std::vector<double> old = [&] {
        std::vector<double> v;
        for (const auto& c : cuts) v.push_back(c.lambda);
        return v;
      }();
      bool accepted = false;
      for (int tries = 0; tries < 60; ++tries) {
        for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i].lambda = std::max(0.0, old[i] + step * grad[i]);
        rebuild_g();
        const double trial = dual_value();
        if (trial >= value - 1e-15 * std::abs(value)) {
          value = trial;
          step *= 1.5;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i].lambda = old[i];
        rebuild_g();
        return violation() <= tol;
      }
    }
    return violation() <= tol;
  }

 private:
  double p_;
  double inv_pm1_;
  std::vector<double> sigma_;
  std::vector<double> g_;
};

DensityField scaled(const DensityField& rho, double factor) {
  DensityField out = rho;
  for (auto& v : out.values) v *= factor;
  return out;
}

}  // namespace

ModulusResult solve_modulus(const GridComplex& complex, const MemberSource& family, const SolverConfig& config) {
  config.validate();
  const double p = config.p;
  ModulusResult result;
  DualProblem dual(complex, p);
  std::unordered_set<std::size_t> seen;
  DensityField rho = DensityField::constant(complex.num_top_cells(), 0.0);
  double best_ub = std::numeric_limits<double>::infinity();
  DensityField best_rho = rho;
  double lb = 0.0;
  double inner_tol = std::min({1e-11, 0.01 * config.tol_feasibility, 0.01 * config.tol_gap});
  const int max_sweeps = config.inner_max_sweeps;

  for (int iter = 0;; ++iter) {
    if (!dual.cuts.empty()) {
      const bool ok = config.inner == InnerMethod::dual_ascent ? dual.solve_dual_ascent(inner_tol, max_sweeps)
                                                              : dual.solve_projected_gradient(inner_tol, max_sweeps);
      if (!ok) result.inner_nonconvergent = true;
      rho = dual.rho();
      lb = std::max(lb, dual.dual_value());
    }
    const auto member = family.min_member(rho);
    if (!member) {
      // Empty family: rho = 0 is admissible.
      result.value = 0.0;
      result.rho = DensityField::constant(complex.num_top_cells(), 0.0);
      result.min_weight = std::numeric_limits<double>::infinity();
      result.converged = true;
      result.iterations.push_back({iter, 0, 0.0, 0.0, result.min_weight});
      return result;
    }
    const double w = member_weight(complex, *member, rho);
    if (w > 0.0) {
      const double ub = energy(complex, rho, p) / std::pow(w, p);
      if (ub < best_ub) {
        best_ub = ub;
        best_rho = scaled(rho, 1.0 / w);
      }
    }
    result.iterations.push_back({iter, static_cast<int>(dual.cuts.size()), lb, best_ub, w});

    const bool feasible = w >= 1.0 - config.tol_feasibility;
    const bool gap_ok = best_ub - lb <= config.tol_gap * std::max(lb, 1e-300);
    if (feasible && gap_ok) {
      result.converged = true;
      break;
    }
    const std::size_t key = member_key(*member);
    if (w < 1.0 && !seen.count(key)) {
      if (static_cast<int>(dual.cuts.size()) >= config.max_cuts) {
        result.max_cuts_exceeded = true;
        break;
      }
      seen.insert(key);
      Cut cut;
      cut.member = *member;
      cut.coeffs = member_coefficients(complex, *member);
      dual.cuts.push_back(std::move(cut));
      continue;
    }
    // No new cut: the inner solution is not accurate enough for the gap.
    if (result.inner_nonconvergent || inner_tol <= 1e-15) {
      result.inner_nonconvergent = true;
      break;
    }
    inner_tol = std::max(1e-15, inner_tol * 1e-2);
  }

  result.rho = best_rho;
  result.value = best_ub;
  result.upper_bound = best_ub;
  result.lower_bound = std::min(lb, best_ub);
  if (std::isfinite(best_ub)) {
    const auto check = family.min_member(best_rho);
    result.min_weight = check ? member_weight(complex, *check, best_rho) : std::numeric_limits<double>::infinity();
  }
  for (const auto& cut : dual.cuts) {
    if (cut.lambda > 0.0) result.active.push_back({cut.member, cut.lambda});
  }
  return result;
}

ModulusResult solve_modulus(const GridComplex& complex, const FamilyHandle& family, const SolverConfig& config) {
  family.validate(complex);
  FamilySource source(complex, family);
  return solve_modulus(complex, source, config);
}

DensityField rescale_to_feasible(const GridComplex& complex, const DensityField& rho, const MemberSource& family) {
  const auto member = family.min_member(rho);
  if (!member) return rho;
  const double w = member_weight(complex, *member, rho);
  if (!(w > 0.0)) throw InvalidInput("minimum member weight is zero; density cannot be rescaled");
  return scaled(rho, 1.0 / w);
}

CertificateCheck check_certificates(const GridComplex& complex, const MemberSource& family, const ModulusResult& result,
                                    const SolverConfig& config) {
  CertificateCheck out;
  const double p = config.p;
  out.primal_energy = energy(complex, result.rho, p);
  const auto member = family.min_member(result.rho);
  out.primal_min_weight = member ? member_weight(complex, *member, result.rho) : std::numeric_limits<double>::infinity();

  // Dual value rebuilt from the multipliers alone.
  std::vector<double> g(complex.num_top_cells(), 0.0);
  double sum_lambda = 0.0;
  for (const auto& a : result.active) {
    if (a.multiplier < 0.0) return out;
    sum_lambda += a.multiplier;
    const auto coeffs = member_coefficients(complex, a.member);
    for (std::size_t i = 0; i < coeffs.cells.size(); ++i) g[coeffs.cells[i]] += a.multiplier * coeffs.values[i];
  }
  double e = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g[c] <= 0.0) continue;
    const double sigma = complex.measure(complex.n(), c);
    e += sigma * std::pow(g[c] / (p * sigma), p / (p - 1.0));
  }
  out.dual_value = sum_lambda - (p - 1.0) * e;

  // Feasible primal bound: energy of rho scaled up to exact admissibility.
  const double w = std::min(1.0, out.primal_min_weight);
  const double primal_bound = w > 0.0 ? out.primal_energy / std::pow(w, p) : std::numeric_limits<double>::infinity();
  const double scale = std::max({std::abs(primal_bound), std::abs(out.dual_value), 1e-300});
  out.sandwich = out.dual_value <= primal_bound + 1e-12 * scale &&
                 std::abs(out.dual_value - result.lower_bound) <= 1e-8 * scale &&
                 result.lower_bound <= result.value + 1e-12 * scale && result.value <= result.upper_bound &&
                 out.primal_min_weight >= 1.0 - config.tol_feasibility;
  return out;
}

}  // namespace pmod
