// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pmod/capacity.hpp"
#include "pmod/duality_lab.hpp"
#include "pmod/families.hpp"
#include "pmod/homology.hpp"
#include "pmod/mollifier.hpp"
#include "pmod/modulus_solver.hpp"

using namespace pmod;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

BoxSpec make_box(int n, int k, double a, double b, int m, Deformation def = {}) {
  BoxSpec s;
  s.n = n;
  s.k = k;
  s.side_q1.assign(k, a);
  s.side_q2.assign(n - k, b);
  s.m = m;
  s.deformation = def;
  return s;
}

std::string num(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every solve goes through here so the certificate check covers all runs.
int g_runs = 0;
int g_sandwich_failures = 0;

ModulusResult solve_checked(const GridComplex& g, const MemberSource& family, const SolverConfig& cfg) {
  auto r = solve_modulus(g, family, cfg);
  const auto cert = check_certificates(g, family, r, cfg);
  ++g_runs;
  if (!cert.sandwich) ++g_sandwich_failures;
  return r;
}

ModulusResult solve_checked(const GridComplex& g, const FamilyHandle& h, double p) {
  SolverConfig cfg;
  cfg.p = p;
  return solve_checked(g, FamilySource(g, h), cfg);
}

Outcome exact_formulas() {
  struct Case {
    int n, k;
    double p, a, b;
  };
  const Case cases[] = {{2, 1, 2, 1, 1}, {2, 1, 2, 2, 1}, {2, 1, 3, 2, 1},
                        {3, 1, 2, 1, 1}, {3, 2, 2, 1, 1}, {3, 1, 2, 2, 1}};
  double worst = 0.0;
  double worst_product = 0.0;
  for (const auto& c : cases) {
    const auto g = build_grid(make_box(c.n, c.k, c.a, c.b, 4));
    const double q = c.p / (c.p - 1.0);
    const double ma = solve_checked(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.0}, c.p).value;
    const double mb = solve_checked(g, FamilyHandle{FamilySide::B, FamilyMode::axis_restricted, 0.0}, q).value;
    const double ea = exact_modulus_a(g.spec(), c.p);
    const double eb = exact_modulus_b(g.spec(), q);
    worst = std::max({worst, std::abs(ma - ea) / ea, std::abs(mb - eb) / eb});
    worst_product = std::max(worst_product, std::abs(std::pow(ma, 1.0 / c.p) * std::pow(mb, 1.0 / q) - 1.0));
  }
  return {worst <= 1e-6 && worst_product <= 1e-6,
          "max relative error " + num(worst) + ", max |product - 1| " + num(worst_product)};
}

Outcome full_family_bound() {
  bool ok = true;
  std::string detail;
  for (double s : {0.0, 0.3}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const double q = p / (p - 1.0);
      std::vector<double> slack;
      std::string row;
      for (int m : {8, 16, 32}) {
        const Deformation def = s == 0.0 ? Deformation{} : Deformation{DeformationKind::shear, s};
        const auto g = build_grid(make_box(2, 1, 1.0, 1.0, m, def));
        const double ma = solve_checked(g, FamilyHandle{FamilySide::A, FamilyMode::full, 0.0}, p).value;
        const double mb = solve_checked(g, FamilyHandle{FamilySide::B, FamilyMode::full, 0.0}, q).value;
        const double product = std::pow(ma, 1.0 / p) * std::pow(mb, 1.0 / q);
        slack.push_back(std::max(0.0, product - 1.0));
        row += (row.empty() ? "" : "/") + num(product, "%.4f");
      }
      // Products are certified to the solver's relative gap, so slacks closer
      // than that are indistinguishable.
      const double tol = SolverConfig{}.tol_gap;
      const bool here = slack[2] <= slack[1] + tol && slack[1] <= slack[0] + tol && slack[2] <= 0.05;
      ok = ok && here;
      detail += (detail.empty() ? "" : "; ") + std::string(s == 0.0 ? "square" : "shear") + " p=" + num(p) + " " + row +
                " (max slack " + num(*std::max_element(slack.begin(), slack.end()), "%.1e") + ")";
    }
  }
  return {ok, "products m=8/16/32: " + detail};
}

Outcome dual_density() {
  double worst = std::numeric_limits<double>::infinity();
  std::string detail;
  for (double a : {1.0, 2.0}) {
    const auto g = build_grid(make_box(2, 1, a, 1.0, 32));
    for (auto mode : {FamilyMode::axis_restricted, FamilyMode::full}) {
      const auto rb = solve_checked(g, FamilyHandle{FamilySide::B, mode, 0.0}, 2.0);
      const double margin = dual_density_check(g, rb, FamilyHandle{FamilySide::A, mode, 0.0}, 2.0);
      worst = std::min(worst, margin);
      detail += (detail.empty() ? "" : ", ") + std::string(a == 1.0 ? "square " : "box ") + to_string(mode) + " " +
                num(margin, "%.8f");
    }
  }
  return {worst >= 1.0 - 0.02, "min weights " + detail};
}

Outcome mollifier_admissibility() {
  const auto g = build_grid(make_box(2, 1, 1.0, 1.0, 16));
  MollifierSettings s;
  s.epsilon = 0.1;
  s.margin = 0.2;
  s.samples = 20;
  s.order = 4;
  const auto low = mollifier_check(g, s, 7);
  s.order = 8;
  const auto high = mollifier_check(g, s, 7);
  const double deficit4 = 1.0 - low.margin.margin;
  const double deficit8 = 1.0 - high.margin.margin;
  return {deficit4 <= 5e-3 && deficit8 < 1e-3,
          std::to_string(low.sample_size) + " blockers; order 4 margin " + num(low.margin.margin, "%.10f") +
              ", order 8 margin " + num(high.margin.margin, "%.10f")};
}

Outcome translation_identity() {
  const auto g = build_grid(make_box(2, 1, 1.0, 1.0, 32));
  const double margin = 0.45;
  const auto a = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, margin});
  const auto b = axis_members(g, FamilyHandle{FamilySide::B, FamilyMode::axis_restricted, margin});
  const SliceMember& sa = a.front();
  const SliceMember& sb = b.back();
  const std::array<int, kMaxDim> za{0, 1, 0, 0};
  const std::array<int, kMaxDim> zb{-1, 0, 0, 0};
  const auto ta = translate_member(g, sa, za, margin);
  const auto tb = translate_member(g, sb, zb, margin);
  const auto kernel = make_kernel(2, 0.1);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const bool first = i % 2 == 0;
    const auto& z = first ? za : zb;
    Point x{};
    x[0] = first ? u(rng) : 0.3 + 0.4 * u(rng);
    x[1] = first ? 0.3 + 0.4 * u(rng) : u(rng);
    Point back = x;
    for (int d = 0; d < 2; ++d) back[d] -= z[d] * g.spacing();
    const double lhs = convolve_surface(g, first ? ta : tb, kernel, x);
    const double rhs = convolve_surface(g, first ? sa : sb, kernel, back);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst <= 1e-12, "max difference over 100 points " + num(worst, "%.3g")};
}

Outcome topology() {
  struct Case {
    int n, k;
    int scan_m;
    double scan_margin;
  };
  const Case cases[] = {{2, 1, 32, 0.45}, {3, 1, 24, 0.45}, {3, 2, 24, 0.45}, {4, 2, 2, 0.25}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto g = build_grid(make_box(c.n, c.k, 1.0, 1.0, 2));
    const auto h = homology_check(g, 20, 3);
    const bool groups = h.a.betti == 1 && h.b.betti == 1 && h.a.torsion.empty() && h.b.torsion.empty();
    const bool blockers = h.members_checked > 0 && h.members_in_star == h.members_checked;
    const auto scan = intersection_scan(build_grid(make_box(c.n, c.k, 1.0, 1.0, c.scan_m)), c.scan_margin, 20, 5);
    const bool here = groups && h.parity == 1 && blockers && scan.misses == 0 && scan.pairs > 0;
    ok = ok && here;
    detail += (detail.empty() ? "" : "; ") + std::string("(") + std::to_string(c.n) + "," + std::to_string(c.k) +
              ") betti " + std::to_string(h.a.betti) + "/" + std::to_string(h.b.betti) + " parity " +
              std::to_string(h.parity) + " blockers " + std::to_string(h.members_in_star) + "/" +
              std::to_string(h.members_checked) + " misses " + std::to_string(scan.misses) + "/" +
              std::to_string(scan.pairs);
  }
  return {ok, detail};
}

Outcome capacity_identity() {
  bool ok = true;
  std::string detail;
  SolverConfig solver;
  for (double a : {1.0, 2.0}) {
    const auto g = build_grid(make_box(2, 1, a, 1.0, 32));
    for (double p : {2.0, 3.0}) {
      const auto r = capacity_modulus_report(g, p, solver);
      ok = ok && r.relative_gap <= 0.05 && r.lower_product >= 1.0 - 0.05;
      detail += (detail.empty() ? "" : "; ") + std::string(a == 1.0 ? "square" : "box") + " p=" + num(p) + " gap " +
                num(r.relative_gap, "%.2e") + " lower " + num(r.lower_product, "%.6f");
    }
  }
  return {ok, detail};
}

std::vector<SliceMember> random_members(const GridComplex& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& edges = g.cells(1);
  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  std::vector<SliceMember> out;
  for (int i = 0; i < count; ++i) {
    SliceMember s;
    s.dim = 1;
    for (int j = 0; j < 4; ++j) {
      const auto& e = edges[pick(rng)];
      if (std::find(s.cells.begin(), s.cells.end(), e) != s.cells.end()) continue;
      s.cells.push_back(e);
      s.weights.push_back(g.measure(e));
    }
    out.push_back(std::move(s));
  }
  return out;
}

Outcome solver_properties() {
  const auto g = build_grid(make_box(2, 1, 1.0, 1.0, 6));
  const auto members = random_members(g, 16, 13);
  SolverConfig cfg;
  cfg.tol_feasibility = 1e-10;
  cfg.tol_gap = 1e-11;

  double scaling = 0.0;
  bool monotone = true;
  double spread = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    cfg.p = p;
    const auto base = solve_checked(g, ExplicitSource(g, members), cfg);
    for (double t : {0.5, 2.0, 7.0}) {
      auto scaled = members;
      for (auto& s : scaled)
        for (auto& w : s.weights) w *= t;
      const double v = solve_checked(g, ExplicitSource(g, scaled), cfg).value;
      scaling = std::max(scaling, std::abs(v - base.value * std::pow(t, -p)) / (base.value * std::pow(t, -p)));
    }
    double prev = 0.0;
    for (std::size_t take = 1; take <= members.size(); ++take) {
      const double v = solve_checked(g, ExplicitSource(g, {members.begin(), members.begin() + long(take)}), cfg).value;
      monotone = monotone && v >= prev - 1e-9 * std::max(1.0, prev);
      prev = v;
    }
    monotone = monotone && std::abs(prev - base.value) <= 1e-9 * base.value;
    auto shuffled = members;
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 3; ++trial) {
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto r = solve_checked(g, ExplicitSource(g, shuffled), cfg);
      for (std::size_t i = 0; i < r.rho.size(); ++i) spread = std::max(spread, std::abs(r.rho.values[i] - base.rho.values[i]));
    }
  }
  const bool ok = g_sandwich_failures == 0 && scaling <= 1e-9 && monotone && spread <= 1e-5;
  return {ok, "sandwich failures " + std::to_string(g_sandwich_failures) + "/" + std::to_string(g_runs) +
                  " runs, scaling error " + num(scaling, "%.2e") + ", nested families " +
                  (monotone ? "monotone" : "NOT monotone") + ", shuffle spread " + num(spread, "%.2e")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  // The solver suite runs last so its sandwich count covers every solve.
  const std::vector<Criterion> criteria{
      {1, "exact product-box moduli", 10, exact_formulas},
      {2, "duality bound with full families", 300, full_family_bound},
      {3, "dual density admissibility", 60, dual_density},
      {4, "mollifier admissibility", 120, mollifier_admissibility},
      {5, "translation identity", 10, translation_identity},
      {6, "topology suite", 120, topology},
      {7, "capacity identity", 120, capacity_identity},
      {8, "solver properties", 60, solver_properties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
