#include "pmod/duality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

#include "pmod/error.hpp"

namespace pmod {

using nlohmann::json;

namespace {

double volume(const std::vector<double>& sides) {
  double v = 1.0;
  for (double s : sides) v *= s;
  return v;
}

CheckOutcome make_check(std::string name, bool passed, double value, std::string detail, bool asserted = true) {
  CheckOutcome c;
  c.name = std::move(name);
  c.passed = passed;
  c.asserted = asserted;
  c.value = value;
  c.detail = std::move(detail);
  return c;
}

CheckOutcome skipped_check(std::string name, std::string why) {
  CheckOutcome c;
  c.name = std::move(name);
  c.skipped = true;
  c.asserted = false;
  c.detail = std::move(why);
  return c;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidInput("unknown key '" + where + (where.empty() ? "" : ".") + key + "'");
  }
}

}  // namespace

double ExperimentConfig::slack() const {
  if (product_slack) return *product_slack;
  return families == FamilyMode::axis_restricted ? 1e-6 : 0.05;
}

BoxSpec ExperimentConfig::box_at(int m) const {
  BoxSpec b = box;
  b.m = m;
  return b;
}

void ExperimentConfig::validate() const {
  if (resolutions.empty()) throw InvalidInput("resolutions must be nonempty");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    if (resolutions[i] < 1) throw InvalidInput("resolutions must be positive");
    if (i > 0 && resolutions[i] <= resolutions[i - 1]) throw InvalidInput("resolutions must be increasing");
  }
  for (int m : resolutions) box_at(m).validate();
  SolverConfig sa = solver;
  sa.p = p;
  sa.validate();
  sa.p = q();
  if (!(sa.p >= kMinP && sa.p <= kMaxP)) throw InvalidInput("conjugate exponent q lies outside [1.05, 20]");
  for (const auto& c : checks) {
    if (!known_checks().count(c)) throw InvalidInput("unknown check '" + c + "'");
  }
  if (!(delta_margin >= 0.0)) throw InvalidInput("delta_margin must be nonnegative");
  if (product_slack && !(*product_slack >= 0.0)) throw InvalidInput("product_slack must be nonnegative");
  if (!(dual_tolerance >= 0.0)) throw InvalidInput("dual_tolerance must be nonnegative");
  if (!(mollifier.epsilon > 0.0)) throw InvalidInput("mollifier.epsilon must be positive");
  if (mollifier.order < 1 || mollifier.order > 64) throw InvalidInput("mollifier.order must lie in [1, 64]");
  if (mollifier.samples < 0) throw InvalidInput("mollifier.samples must be nonnegative");
  if (!(mollifier.margin >= 0.0)) throw InvalidInput("mollifier.margin must be nonnegative");
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  j["box"] = {{"n", c.box.n},
              {"k", c.box.k},
              {"side_Q1", c.box.side_q1},
              {"side_Q2", c.box.side_q2},
              {"deformation", {{"kind", to_string(c.box.deformation.kind)}, {"parameter", c.box.deformation.parameter}}}};
  j["p"] = c.p;
  j["families"] = to_string(c.families);
  j["resolutions"] = c.resolutions;
  j["checks"] = std::vector<std::string>(c.checks.begin(), c.checks.end());
  j["seed"] = c.seed;
  j["solver"] = {{"tol_feasibility", c.solver.tol_feasibility},
                 {"tol_gap", c.solver.tol_gap},
                 {"max_cuts", c.solver.max_cuts},
                 {"inner", to_string(c.solver.inner)}};
  j["delta_margin"] = c.delta_margin;
  j["product_slack"] = c.product_slack ? json(*c.product_slack) : json(nullptr);
  j["dual_tolerance"] = c.dual_tolerance;
  j["mollifier"] = {{"epsilon", c.mollifier.epsilon},
                    {"order", c.mollifier.order},
                    {"margin", c.mollifier.margin},
                    {"samples", c.mollifier.samples},
                    {"kernel", to_string(c.mollifier.kernel)}};
  j["modulus"] = {{"side", to_string(c.modulus_side)}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"schema", "box", "p", "families", "resolutions", "checks", "seed", "solver", "delta_margin",
                    "product_slack", "dual_tolerance", "mollifier", "modulus"},
                   "");
    const auto schema = get_or<std::string>(j, "schema", kConfigSchema);
    if (schema != kConfigSchema) throw InvalidInput("unsupported schema '" + schema + "'");
    if (j.contains("box")) {
      const auto& b = j.at("box");
      reject_unknown(b, {"n", "k", "side_Q1", "side_Q2", "deformation", "m"}, "box");
      c.box.n = get_or(b, "n", c.box.n);
      c.box.k = get_or(b, "k", c.box.k);
      c.box.side_q1 = get_or(b, "side_Q1", std::vector<double>(c.box.k, 1.0));
      c.box.side_q2 = get_or(b, "side_Q2", std::vector<double>(c.box.n - c.box.k, 1.0));
      c.box.m = get_or(b, "m", c.box.m);
      if (b.contains("deformation")) {
        const auto& d = b.at("deformation");
        reject_unknown(d, {"kind", "parameter"}, "box.deformation");
        c.box.deformation.kind = deformation_from_string(get_or<std::string>(d, "kind", "identity"));
        c.box.deformation.parameter = get_or(d, "parameter", 0.0);
      }
    }
    c.p = get_or(j, "p", c.p);
    c.families = family_mode_from_string(get_or<std::string>(j, "families", to_string(c.families)));
    c.resolutions = get_or(j, "resolutions", c.resolutions);
    if (j.contains("checks")) {
      c.checks.clear();
      for (const auto& s : j.at("checks").get<std::vector<std::string>>()) c.checks.insert(s);
    }
    c.seed = get_or(j, "seed", c.seed);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      reject_unknown(s, {"tol_feasibility", "tol_gap", "max_cuts", "inner"}, "solver");
      c.solver.tol_feasibility = get_or(s, "tol_feasibility", c.solver.tol_feasibility);
      c.solver.tol_gap = get_or(s, "tol_gap", c.solver.tol_gap);
      c.solver.max_cuts = get_or(s, "max_cuts", c.solver.max_cuts);
      c.solver.inner = inner_method_from_string(get_or<std::string>(s, "inner", to_string(c.solver.inner)));
    }
    c.delta_margin = get_or(j, "delta_margin", c.delta_margin);
    if (j.contains("product_slack") && !j.at("product_slack").is_null()) {
      c.product_slack = j.at("product_slack").get<double>();
    }
    c.dual_tolerance = get_or(j, "dual_tolerance", c.dual_tolerance);
    if (j.contains("mollifier")) {
      const auto& mo = j.at("mollifier");
      reject_unknown(mo, {"epsilon", "order", "margin", "samples", "kernel"}, "mollifier");
      c.mollifier.epsilon = get_or(mo, "epsilon", c.mollifier.epsilon);
      c.mollifier.order = get_or(mo, "order", c.mollifier.order);
      c.mollifier.margin = get_or(mo, "margin", c.mollifier.margin);
      c.mollifier.samples = get_or(mo, "samples", c.mollifier.samples);
      c.mollifier.kernel = kernel_profile_from_string(get_or<std::string>(mo, "kernel", "bump"));
    }
    if (j.contains("modulus")) {
      const auto& mo = j.at("modulus");
      reject_unknown(mo, {"side"}, "modulus");
      c.modulus_side = family_side_from_string(get_or<std::string>(mo, "side", "A"));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

json default_config_json() { return to_json(ExperimentConfig{}); }

double exact_modulus_a(const BoxSpec& box, double p) {
  return volume(box.side_q2) / std::pow(volume(box.side_q1), p - 1.0);
}

double exact_modulus_b(const BoxSpec& box, double q) {
  return volume(box.side_q1) / std::pow(volume(box.side_q2), q - 1.0);
}

double dual_density_check(const GridComplex& complex, const ModulusResult& result_b, const FamilyHandle& family_a,
                          double q) {
  if (!(result_b.value > 0.0)) throw InvalidInput("dual density needs a positive Gamma_B modulus");
  DensityField phi;
  phi.values.reserve(result_b.rho.size());
  for (double r : result_b.rho.values) phi.values.push_back(std::pow(r, q - 1.0) / result_b.value);
  const auto member = min_weight_member(complex, phi, family_a);
  if (!member) return std::numeric_limits<double>::infinity();
  return member_weight(complex, *member, phi);
}

std::vector<DensityField> random_densities(const GridComplex& complex, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> dist(0.0, 1.0);
  std::vector<DensityField> out(static_cast<std::size_t>(std::max(count, 0)));
  for (auto& rho : out) {
    rho.values.resize(complex.num_top_cells());
    for (auto& v : rho.values) v = dist(rng);
  }
  return out;
}

std::vector<SliceMember> star_sample(const GridComplex& complex, double margin, int count, std::uint64_t seed) {
  std::vector<SliceMember> out;
  if (complex.spec().deformation.is_identity()) {
    out = axis_members(complex, FamilyHandle{FamilySide::B, FamilyMode::axis_restricted, margin});
  }
  FamilyHandle star{FamilySide::A_star, FamilyMode::full, margin};
  if (oracle_name(complex, star).empty()) star = FamilyHandle{FamilySide::B, FamilyMode::full, margin};
  for (const auto& rho : random_densities(complex, count, seed)) {
    auto m = min_weight_member(complex, rho, star);
    if (m && m->integral) out.push_back(std::move(*m));
  }
  return out;
}

IntersectionScanReport intersection_scan(const GridComplex& complex, double margin, int samples, std::uint64_t seed) {
  IntersectionScanReport report;
  const auto members = axis_members(complex, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, margin});
  const auto stars = star_sample(complex, margin, samples, seed);
  report.members = members.size();
  report.stars = stars.size();

  const auto lat = refined_lattice(complex);
  auto vertices = [&](const SliceMember& s) {
    std::unordered_set<CellId, CellIdHash> verts;
    for (const auto& c : refined_support(complex, s)) {
      for (const auto& v : lat.closure_vertices(c)) verts.insert(v);
    }
    return verts;
  };
  std::vector<std::unordered_set<CellId, CellIdHash>> star_verts;
  star_verts.reserve(stars.size());
  for (const auto& s : stars) star_verts.push_back(vertices(s));

  // Candidate shifts: |z| h < margin / 10.
  const int n = complex.n();
  const int reach = static_cast<int>(std::floor(margin / (10.0 * complex.spacing())));
  std::vector<std::array<int, kMaxDim>> shifts;
  std::array<int, kMaxDim> z{};
  for (int a = 0; a < n; ++a) z[a] = -reach;
  while (true) {
    shifts.push_back(z);
    int a = 0;
    while (a < n && z[a] == reach) z[a++] = -reach;
    if (a == n) break;
    ++z[a];
  }

  for (std::size_t i = 0; i < members.size(); ++i) {
    for (const auto& shift : shifts) {
      SliceMember moved;
      try {
        moved = translate_member(complex, members[i], shift, margin);
      } catch (const InvalidInput&) {
        continue;
      }
      ++report.translates;
      std::vector<CellId> verts;
      for (const auto& c : refined_support(complex, moved)) {
        const auto v = lat.closure_vertices(c);
        verts.insert(verts.end(), v.begin(), v.end());
      }
      for (std::size_t s = 0; s < stars.size(); ++s) {
        ++report.pairs;
        const bool hit = std::any_of(verts.begin(), verts.end(), [&](const CellId& v) { return star_verts[s].count(v) > 0; });
        if (!hit) {
          ++report.misses;
          if (report.counterexamples.size() < 10) {
            std::ostringstream os;
            os << "member " << i << " shift (";
            for (int a = 0; a < n; ++a) os << (a ? "," : "") << shift[a];
            os << ") blocker " << s << " (" << stars[s].origin << ")";
            report.counterexamples.push_back(os.str());
          }
        }
      }
    }
  }
  return report;
}

StarComparison star_vs_B_comparison(const GridComplex& complex, double q, const SolverConfig& solver) {
  SolverConfig cfg = solver;
  cfg.p = q;
  StarComparison out;
  out.star = solve_modulus(complex, FamilyHandle{FamilySide::A_star, FamilyMode::full, 0.0}, cfg).value;
  const auto mode = complex.spec().deformation.is_identity() ? FamilyMode::axis_restricted : FamilyMode::full;
  out.b = solve_modulus(complex, FamilyHandle{FamilySide::B, mode, 0.0}, cfg).value;
  out.gap = out.star - out.b;
  return out;
}

MollifierCheck mollifier_check(const GridComplex& complex, const MollifierSettings& settings, std::uint64_t seed) {
  if (!(settings.epsilon < settings.margin)) {
    throw InvalidInput("mollifier epsilon " + fmt(settings.epsilon) + " must be smaller than the margin " +
                       fmt(settings.margin));
  }
  const auto fibers = axis_members(complex, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, settings.margin});
  if (fibers.empty()) throw InvalidInput("no Gamma_A fiber keeps the mollifier margin");
  const SliceMember& s = fibers[fibers.size() / 2];
  const auto sample = star_sample(complex, settings.margin, settings.samples, seed);
  MollifierCheck out;
  out.sample_size = sample.size();
  out.margin = admissibility_margin(complex, s, make_kernel(complex.n(), settings.epsilon, settings.kernel), sample,
                                    settings.margin, settings.order);
  return out;
}

HomologyCheck homology_check(const GridComplex& complex, int samples, std::uint64_t seed) {
  HomologyCheck out;
  const int n = complex.n();
  const int k = complex.k();
  out.a = relative_homology(complex, Side::A, k);
  out.b = relative_homology(complex, Side::B, n - k);
  out.parity = intersection_parity(complex, axis_generator_A(complex), dual_axis_generator_B(complex));

  std::vector<SliceMember> members;
  const auto densities = random_densities(complex, samples, seed);
  for (auto side : {FamilySide::B, FamilySide::A_star}) {
    const FamilyHandle h{side, FamilyMode::full, 0.0};
    if (oracle_name(complex, h).empty()) continue;
    for (const auto& rho : densities) {
      auto m = min_weight_member(complex, rho, h);
      if (m && m->integral && m->kind == MemberKind::face_chain) members.push_back(std::move(*m));
    }
  }
  for (const auto& m : members) {
    ++out.members_checked;
    if (is_in_star_family(complex, refine_cells(m.cells))) ++out.members_in_star;
  }
  return out;
}

bool DualityReport::bound_violated() const {
  return std::any_of(records.begin(), records.end(), [](const ResolutionRecord& r) { return r.verdict == "violation"; });
}

bool DualityReport::all_passed() const {
  return std::none_of(records.begin(), records.end(),
                      [](const ResolutionRecord& r) { return r.verdict == "violation" || r.verdict == "fail"; });
}

DualityReport run_duality(const ExperimentConfig& config) {
  config.validate();
  DualityReport report;
  report.config = config;
  const double p = config.p;
  const double q = config.q();
  const bool identity = config.box.deformation.is_identity();
  const bool axis = config.families == FamilyMode::axis_restricted;

  for (int m : config.resolutions) {
    const auto complex = build_grid(config.box_at(m));
    ResolutionRecord rec;
    rec.m = m;
    rec.p = p;
    rec.q = q;

    SolverConfig sa = config.solver;
    sa.p = p;
    SolverConfig sb = config.solver;
    sb.p = q;
    const FamilyHandle ha{FamilySide::A, config.families, config.delta_margin};
    const FamilyHandle hb{FamilySide::B, config.families, config.delta_margin};
    ha.validate(complex);
    hb.validate(complex);
    rec.result_a = solve_modulus(complex, ha, sa);
    rec.result_b = solve_modulus(complex, hb, sb);
    rec.mod_a = rec.result_a.value;
    rec.mod_b = rec.result_b.value;
    rec.product = std::pow(rec.mod_a, 1.0 / p) * std::pow(rec.mod_b, 1.0 / q);
    if (identity) {
      rec.exact_a = exact_modulus_a(complex.spec(), p);
      rec.exact_b = exact_modulus_b(complex.spec(), q);
    }

    const bool violated = rec.product > 1.0 + config.slack();
    rec.checks.push_back(make_check("product", !violated, rec.product,
                                    "product " + fmt(rec.product) + " vs 1 + " + fmt(config.slack())));
    // Below 1 is data only.
    rec.checks.push_back(make_check("product-lower", rec.product >= 1.0 - config.slack(), rec.product,
                                    "distance below 1: " + fmt(std::max(0.0, 1.0 - rec.product)), false));
    if (identity && axis && config.delta_margin == 0.0) {
      const double ea = std::abs(rec.mod_a - *rec.exact_a) / *rec.exact_a;
      const double eb = std::abs(rec.mod_b - *rec.exact_b) / *rec.exact_b;
      rec.checks.push_back(make_check("exact", ea <= 1e-6 && eb <= 1e-6 && std::abs(rec.product - 1.0) <= 1e-6,
                                      std::max(ea, eb),
                                      "relative errors A " + fmt(ea) + ", B " + fmt(eb)));
    }
    {
      FamilySource fa(complex, ha);
      FamilySource fb(complex, hb);
      const auto ca = check_certificates(complex, fa, rec.result_a, sa);
      const auto cb = check_certificates(complex, fb, rec.result_b, sb);
      rec.checks.push_back(make_check("certificates", ca.sandwich && cb.sandwich,
                                      std::max(rec.result_a.relative_gap(), rec.result_b.relative_gap()),
                                      "dual values " + fmt(ca.dual_value) + ", " + fmt(cb.dual_value)));
    }

    const auto& checks = config.checks;
    if (checks.count("dual-density")) {
      if (!rec.result_b.converged) {
        rec.checks.push_back(skipped_check("dual-density", "Gamma_B solve did not converge"));
      } else if (!(rec.mod_b > 0.0)) {
        rec.checks.push_back(skipped_check("dual-density", "Gamma_B has zero modulus"));
      } else {
        const double margin = dual_density_check(complex, rec.result_b, ha, q);
        rec.checks.push_back(make_check("dual-density", margin >= 1.0 - config.dual_tolerance, margin,
                                        "min Gamma_A weight of rho_B^(q-1)/mod_q"));
      }
    }
    if (checks.count("star")) {
      const int n = complex.n();
      const int k = complex.k();
      if (k != 1 && k != n - 1) {
        rec.checks.push_back(skipped_check("star", "no blocking-family oracle for this (n, k)"));
      } else {
        const auto cmp = star_vs_B_comparison(complex, q, config.solver);
        const double tol = 1e-4 * std::max(1.0, cmp.b);
        rec.checks.push_back(make_check("star", cmp.gap >= -tol, cmp.gap,
                                        "star " + fmt(cmp.star) + " vs B " + fmt(cmp.b)));
      }
    }
    if (checks.count("mollifier")) {
      if (!identity) {
        rec.checks.push_back(skipped_check("mollifier", "mollifier needs an undeformed box"));
      } else {
        const auto mc = mollifier_check(complex, config.mollifier, config.seed);
        rec.checks.push_back(make_check("mollifier", mc.margin.margin >= 1.0 - 5e-3, mc.margin.margin,
                                        std::to_string(mc.sample_size) + " sampled blockers"));
      }
    }
    if (checks.count("intersection")) {
      if (!identity) {
        rec.checks.push_back(skipped_check("intersection", "axis members need an undeformed box"));
      } else {
        const auto scan = intersection_scan(complex, config.delta_margin, config.mollifier.samples, config.seed);
        std::string detail = std::to_string(scan.pairs) + " pairs over " + std::to_string(scan.translates) +
                             " translates, " + std::to_string(scan.misses) + " misses";
        for (const auto& c : scan.counterexamples) detail += "; " + c;
        // Without a margin the guarantee does not apply.
        rec.checks.push_back(make_check("intersection", scan.misses == 0, static_cast<double>(scan.misses), detail,
                                        config.delta_margin > 0.0));
      }
    }
    if (checks.count("homology")) {
      try {
        const auto hc = homology_check(complex, config.mollifier.samples, config.seed);
        const bool ok = hc.a.betti == 1 && hc.b.betti == 1 && hc.a.torsion.empty() && hc.b.torsion.empty() &&
                        hc.parity == 1 && hc.members_in_star == hc.members_checked;
        rec.checks.push_back(make_check("homology", ok, hc.parity,
                                        "betti " + std::to_string(hc.a.betti) + "/" + std::to_string(hc.b.betti) +
                                            ", parity " + std::to_string(hc.parity) + ", blockers " +
                                            std::to_string(hc.members_in_star) + "/" +
                                            std::to_string(hc.members_checked)));
      } catch (const LimitExceeded& e) {
        rec.checks.push_back(skipped_check("homology", e.what()));
      }
    }
    if (checks.count("capacity")) {
      if (complex.k() != 1) {
        rec.checks.push_back(skipped_check("capacity", "capacity pathway needs k = 1"));
      } else {
        const auto cr = capacity_modulus_report(complex, p, config.solver, CapacityConfig{}, config.seed);
        rec.checks.push_back(make_check("capacity-gap", cr.relative_gap <= 0.05, cr.relative_gap,
                                        "cap " + fmt(cr.capacity) + " vs mod " + fmt(cr.modulus), identity));
        rec.checks.push_back(make_check("capacity-lower", cr.lower_product >= 1.0 - 0.05, cr.lower_product,
                                        "cap^(1/p) (mod_q star)^(1/q)"));
      }
    }

    const bool failed = std::any_of(rec.checks.begin(), rec.checks.end(),
                                    [](const CheckOutcome& c) { return c.asserted && !c.skipped && !c.passed; });
    if (violated) {
      rec.verdict = "violation";
    } else if (failed) {
      rec.verdict = "fail";
    } else if (!rec.result_a.converged || !rec.result_b.converged) {
      rec.verdict = "unconverged";
    } else {
      rec.verdict = "pass";
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

json to_json(const ModulusResult& r) {
  return {{"value", r.value},
          {"lower_bound", r.lower_bound},
          {"upper_bound", r.upper_bound},
          {"relative_gap", r.relative_gap()},
          {"min_weight", r.min_weight},
          {"active_cuts", r.active.size()},
          {"iterations", r.iterations.size()},
          {"converged", r.converged},
          {"max_cuts_exceeded", r.max_cuts_exceeded},
          {"inner_nonconvergent", r.inner_nonconvergent}};
}

json to_json(const DualityReport& report) {
  json j;
  j["schema"] = "pmod-report/1";
  j["config"] = to_json(report.config);
  j["records"] = json::array();
  for (const auto& r : report.records) {
    json rec{{"m", r.m},
             {"p", r.p},
             {"q", r.q},
             {"mod_p_A", r.mod_a},
             {"mod_q_B", r.mod_b},
             {"product", r.product},
             {"exact_A", r.exact_a ? json(*r.exact_a) : json(nullptr)},
             {"exact_B", r.exact_b ? json(*r.exact_b) : json(nullptr)},
             {"certificates", {{"A", to_json(r.result_a)}, {"B", to_json(r.result_b)}}},
             {"verdict", r.verdict}};
    rec["checks"] = json::array();
    for (const auto& c : r.checks) {
      rec["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"asserted", c.asserted},
                               {"skipped", c.skipped},
                               {"value", c.value},
                               {"detail", c.detail}});
    }
    j["records"].push_back(std::move(rec));
  }
  j["bound_violated"] = report.bound_violated();
  j["all_passed"] = report.all_passed();
  return j;
}

}  // namespace pmod
