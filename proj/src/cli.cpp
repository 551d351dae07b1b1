#include "pmod/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "pmod/error.hpp"

namespace pmod {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidInput("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* node = &config;
  std::stringstream path(key);
  std::string part;
  while (std::getline(path, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw InvalidInput("unknown config key '" + key + "'");
    node = &(*node)[part];
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  *node = std::move(value);
}

void write_atomic(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << contents;
    f.flush();
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string trace_rows(const std::string& family, int m, const ModulusResult& r) {
  std::string s;
  for (const auto& it : r.iterations) {
    s += family + "," + std::to_string(m) + "," + std::to_string(it.iteration) + "," + std::to_string(it.cuts) + "," +
         format_number(it.lower) + "," + format_number(it.upper) + "," + format_number(it.min_weight) + "\n";
  }
  return s;
}

const char* kTraceHeader = "family,m,iteration,cuts,lower,upper,min_weight\n";

}  // namespace

std::string summary_csv(const DualityReport& report) {
  std::string s = "m,p,q,modA,modB,product,exactA,exactB,verdict\n";
  for (const auto& r : report.records) {
    s += std::to_string(r.m) + "," + format_number(r.p) + "," + format_number(r.q) + "," + format_number(r.mod_a) +
         "," + format_number(r.mod_b) + "," + format_number(r.product) + "," + opt_number(r.exact_a) + "," +
         opt_number(r.exact_b) + "," + r.verdict + "\n";
  }
  return s;
}

std::string trace_csv(const DualityReport& report) {
  std::string s = kTraceHeader;
  for (const auto& r : report.records) {
    s += trace_rows("A", r.m, r.result_a);
    s += trace_rows("B", r.m, r.result_b);
  }
  return s;
}

std::string convergence_csv(const DualityReport& report) {
  std::string s = "m,p,q,product,slack\n";
  for (const auto& r : report.records) {
    s += std::to_string(r.m) + "," + format_number(r.p) + "," + format_number(r.q) + "," + format_number(r.product) +
         "," + format_number(std::max(0.0, r.product - 1.0)) + "\n";
  }
  return s;
}

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = "pmod-out";
  std::uint64_t seed = 0;
  double tol_feas = 0.0;
  double tol_gap = 0.0;
  bool quiet = false;
  bool has_seed = false;
  bool has_tol_feas = false;
  bool has_tol_gap = false;
};

ExperimentConfig load_config(const Options& o) {
  json j = default_config_json();
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw InvalidInput("cannot read config file '" + o.config_path + "'");
    json parsed;
    try {
      parsed = json::parse(f);
    } catch (const json::parse_error& e) {
      throw InvalidInput("config file '" + o.config_path + "' is not valid JSON: " + e.what());
    }
    j = to_json(config_from_json(parsed));
  }
  for (const auto& s : o.sets) apply_override(j, s);
  if (o.has_seed) j["seed"] = o.seed;
  if (o.has_tol_feas) j["solver"]["tol_feasibility"] = o.tol_feas;
  if (o.has_tol_gap) j["solver"]["tol_gap"] = o.tol_gap;
  return config_from_json(j);
}

struct Output {
  json report;
  std::map<std::string, std::string> files;  // name -> contents, besides report.json
  std::vector<std::string> lines;            // human summary
  int code = kExitOk;
};

Output cmd_grid_info(const ExperimentConfig& c) {
  Output o;
  o.report["config"] = to_json(c);
  o.report["grids"] = json::array();
  std::string csv = "m,n,k,spacing,top_cells,total_cells,volume\n";
  for (int m : c.resolutions) {
    const auto g = build_grid(c.box_at(m));
    json cells = json::array();
    json measures = json::array();
    for (int d = 0; d <= g.n(); ++d) {
      cells.push_back(g.num_cells(d));
      double total = 0.0;
      for (std::size_t i = 0; i < g.num_cells(d); ++i) total += g.measure(d, i);
      measures.push_back(total);
    }
    json oracles;
    for (auto side : {FamilySide::A, FamilySide::B, FamilySide::A_star}) {
      for (auto mode : {FamilyMode::axis_restricted, FamilyMode::full}) {
        oracles[to_string(side)][to_string(mode)] = oracle_name(g, FamilyHandle{side, mode, 0.0});
      }
    }
    const double volume = measures[g.n()].get<double>();
    o.report["grids"].push_back({{"m", m},
                                 {"spacing", g.spacing()},
                                 {"cells_by_dim", cells},
                                 {"measure_by_dim", measures},
                                 {"total_cells", g.total_cells()},
                                 {"oracles", oracles}});
    csv += std::to_string(m) + "," + std::to_string(g.n()) + "," + std::to_string(g.k()) + "," +
           format_number(g.spacing()) + "," + std::to_string(g.num_top_cells()) + "," + std::to_string(g.total_cells()) +
           "," + format_number(volume) + "\n";
    o.lines.push_back("m=" + std::to_string(m) + " cells=" + std::to_string(g.total_cells()) +
                      " volume=" + format_number(volume));
  }
  o.files["summary.csv"] = csv;
  return o;
}

Output cmd_modulus(const ExperimentConfig& c) {
  Output o;
  const FamilySide side = c.modulus_side;
  const double exponent = side == FamilySide::A ? c.p : c.q();
  o.report["config"] = to_json(c);
  o.report["side"] = to_string(side);
  o.report["exponent"] = exponent;
  o.report["records"] = json::array();
  std::string csv = "m,side,exponent,value,lower,upper,relative_gap,converged\n";
  std::string trace = kTraceHeader;
  for (int m : c.resolutions) {
    const auto g = build_grid(c.box_at(m));
    const FamilyHandle h{side, c.families, c.delta_margin};
    h.validate(g);
    SolverConfig s = c.solver;
    s.p = exponent;
    const auto r = solve_modulus(g, h, s);
    json rec = to_json(r);
    rec["m"] = m;
    o.report["records"].push_back(rec);
    csv += std::to_string(m) + "," + to_string(side) + "," + format_number(exponent) + "," + format_number(r.value) +
           "," + format_number(r.lower_bound) + "," + format_number(r.upper_bound) + "," +
           format_number(r.relative_gap()) + "," + (r.converged ? "true" : "false") + "\n";
    trace += trace_rows(to_string(side), m, r);
    o.lines.push_back("m=" + std::to_string(m) + " mod=" + format_number(r.value) +
                      (r.converged ? "" : " (not converged)"));
  }
  o.files["summary.csv"] = csv;
  o.files["solver_trace.csv"] = trace;
  return o;
}

Output cmd_duality(const ExperimentConfig& c, bool converge) {
  Output o;
  const auto report = run_duality(c);
  o.report = to_json(report);
  o.files["summary.csv"] = summary_csv(report);
  o.files["solver_trace.csv"] = trace_csv(report);
  for (const auto& r : report.records) {
    std::string line = "m=" + std::to_string(r.m) + " modA=" + format_number(r.mod_a) +
                       " modB=" + format_number(r.mod_b) + " product=" + format_number(r.product) + " " + r.verdict;
    for (const auto& ch : r.checks) {
      if (ch.asserted && !ch.passed) line += " [" + ch.name + " failed: " + ch.detail + "]";
    }
    o.lines.push_back(line);
  }
  if (converge) {
    o.files["convergence.csv"] = convergence_csv(report);
    // Slacks closer than the solver gap are ties.
    bool monotone = true;
    for (std::size_t i = 1; i < report.records.size(); ++i) {
      const double a = std::max(0.0, report.records[i - 1].product - 1.0);
      const double b = std::max(0.0, report.records[i].product - 1.0);
      monotone = monotone && b <= a + c.solver.tol_gap;
    }
    o.report["slack_monotone"] = monotone;
    o.lines.push_back(std::string("slack monotone under refinement: ") + (monotone ? "yes" : "no"));
  }
  o.code = report.all_passed() ? kExitOk : kExitViolation;
  return o;
}

Output cmd_mollify(const ExperimentConfig& c) {
  Output o;
  o.report["config"] = to_json(c);
  o.report["records"] = json::array();
  std::string csv = "m,epsilon,order,samples,margin,argmin\n";
  for (int m : c.resolutions) {
    const auto g = build_grid(c.box_at(m));
    const auto mc = mollifier_check(g, c.mollifier, c.seed);
    const bool ok = mc.margin.margin >= 1.0 - 5e-3;
    if (!ok) o.code = kExitViolation;
    o.report["records"].push_back({{"m", m},
                                   {"margin", mc.margin.margin},
                                   {"argmin", mc.margin.argmin},
                                   {"values", mc.margin.values},
                                   {"passed", ok}});
    csv += std::to_string(m) + "," + format_number(c.mollifier.epsilon) + "," + std::to_string(c.mollifier.order) +
           "," + std::to_string(mc.sample_size) + "," + format_number(mc.margin.margin) + "," +
           std::to_string(mc.margin.argmin) + "\n";
    o.lines.push_back("m=" + std::to_string(m) + " margin=" + format_number(mc.margin.margin) + (ok ? "" : " FAILED"));
  }
  o.files["summary.csv"] = csv;
  return o;
}

json homology_json(const HomologyReport& h) {
  return {{"dim", h.dim},
          {"subcomplex", h.subcomplex == Side::A ? "A" : (h.subcomplex == Side::B ? "B" : "none")},
          {"betti", h.betti},
          {"torsion", h.torsion}};
}

Output cmd_homology(const ExperimentConfig& c) {
  Output o;
  o.report["config"] = to_json(c);
  o.report["records"] = json::array();
  std::string csv = "m,dim,subcomplex,betti,torsion\n";
  for (int m : c.resolutions) {
    const auto g = build_grid(c.box_at(m));
    const auto hc = homology_check(g, c.mollifier.samples, c.seed);
    const bool ok = hc.a.betti == 1 && hc.b.betti == 1 && hc.a.torsion.empty() && hc.b.torsion.empty() &&
                    hc.parity == 1 && hc.members_in_star == hc.members_checked;
    if (!ok) o.code = kExitViolation;
    o.report["records"].push_back({{"m", m},
                                   {"groups", {homology_json(hc.a), homology_json(hc.b)}},
                                   {"parity", hc.parity},
                                   {"blockers_checked", hc.members_checked},
                                   {"blockers_in_star", hc.members_in_star},
                                   {"passed", ok}});
    for (const auto* h : {&hc.a, &hc.b}) {
      std::string tors;
      for (auto t : h->torsion) tors += (tors.empty() ? "" : " ") + std::to_string(t);
      csv += std::to_string(m) + "," + std::to_string(h->dim) + "," + (h->subcomplex == Side::A ? "A" : "B") + "," +
             std::to_string(h->betti) + "," + tors + "\n";
    }
    o.lines.push_back("m=" + std::to_string(m) + " betti " + std::to_string(hc.a.betti) + "/" +
                      std::to_string(hc.b.betti) + " parity " + std::to_string(hc.parity) + " blockers " +
                      std::to_string(hc.members_in_star) + "/" + std::to_string(hc.members_checked));
  }
  o.files["summary.csv"] = csv;
  return o;
}

Output cmd_capacity(const ExperimentConfig& c) {
  Output o;
  o.report["config"] = to_json(c);
  o.report["records"] = json::array();
  std::string csv = "m,p,cap,mod,gap,star,lower_product,coarea\n";
  const bool identity = c.box.deformation.is_identity();
  for (int m : c.resolutions) {
    const auto g = build_grid(c.box_at(m));
    const auto r = capacity_modulus_report(g, c.p, c.solver, CapacityConfig{}, c.seed);
    const bool ok = r.lower_product >= 1.0 - 0.05 && (!identity || r.relative_gap <= 0.05);
    if (!ok) o.code = kExitViolation;
    o.report["records"].push_back({{"m", m},
                                   {"p", r.p},
                                   {"q", r.q},
                                   {"modulus", r.modulus},
                                   {"capacity", r.capacity},
                                   {"relative_gap", r.relative_gap},
                                   {"star_modulus", r.star_modulus},
                                   {"lower_product", r.lower_product},
                                   {"modulus_product", r.modulus_product},
                                   {"coarea", r.coarea},
                                   {"gradient", r.gradient},
                                   {"holder_bound", r.holder_bound},
                                   {"min_level_weight", r.min_level_weight},
                                   {"potential_converged", r.potential_converged},
                                   {"solves_converged", r.solves_converged},
                                   {"passed", ok}});
    csv += std::to_string(m) + "," + format_number(r.p) + "," + format_number(r.capacity) + "," +
           format_number(r.modulus) + "," + format_number(r.relative_gap) + "," + format_number(r.star_modulus) + "," +
           format_number(r.lower_product) + "," + format_number(r.coarea) + "\n";
    o.lines.push_back("m=" + std::to_string(m) + " cap=" + format_number(r.capacity) + " mod=" +
                      format_number(r.modulus) + " lower=" + format_number(r.lower_product) + (ok ? "" : " FAILED"));
  }
  o.files["summary.csv"] = csv;
  return o;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete p-modulus duality experiments", "pmod"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"grid-info", "Cell counts, measures and available oracles"},
      {"modulus", "Solve one family's modulus"},
      {"duality", "Both moduli, their product and the requested checks"},
      {"converge", "Duality over a resolution sweep with slack table"},
      {"mollify-check", "Mollifier admissibility margin"},
      {"homology-check", "Relative homology, intersection parity, blocker membership"},
      {"capacity", "p-capacity against the path modulus (k = 1)"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON experiment config");
    sub->add_option("--set", opt.sets, "Override a config key, key=value (dotted path)");
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--seed", opt.seed, "Seed for sampled densities")->each([&](const std::string&) { opt.has_seed = true; });
    sub->add_option("--tol-feas", opt.tol_feas, "Solver feasibility tolerance")->each([&](const std::string&) {
      opt.has_tol_feas = true;
    });
    sub->add_option("--tol-gap", opt.tol_gap, "Solver relative gap tolerance")->each([&](const std::string&) {
      opt.has_tol_gap = true;
    });
    sub->add_flag("--quiet", opt.quiet, "No summary on stdout");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pmod: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Output result;
  try {
    const auto config = load_config(opt);
    if (command == "grid-info") {
      result = cmd_grid_info(config);
    } else if (command == "modulus") {
      result = cmd_modulus(config);
    } else if (command == "duality") {
      result = cmd_duality(config, false);
    } else if (command == "converge") {
      result = cmd_duality(config, true);
    } else if (command == "mollify-check") {
      result = cmd_mollify(config);
    } else if (command == "homology-check") {
      result = cmd_homology(config);
    } else {
      result = cmd_capacity(config);
    }
  } catch (const InvalidInput& e) {
    err << "pmod: invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LimitExceeded& e) {
    err << "pmod: limit exceeded: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "pmod: error: " << e.what() << "\n";
    return kExitUsage;
  }

  result.report["command"] = command;
  result.report["exit_code"] = result.code;
  try {
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_atomic(dir / "report.json", result.report.dump(2) + "\n");
    for (const auto& [name, contents] : result.files) write_atomic(dir / name, contents);
  } catch (const std::exception& e) {
    err << "pmod: cannot write reports: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!opt.quiet) {
    for (const auto& line : result.lines) out << line << "\n";
  }
  if (result.code == kExitViolation) err << "pmod: a checked bound was violated; see report.json\n";
  return result.code;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace pmod
