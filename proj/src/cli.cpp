#include "nlstop/cli.hpp"

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlstop/closed_forms.hpp"
#include "nlstop/csv_io.hpp"
#include "nlstop/errors.hpp"
#include "nlstop/majorant.hpp"
#include "nlstop/mc.hpp"
#include "nlstop/risk_mapping.hpp"
#include "nlstop/solver.hpp"

namespace nlstop {

namespace {

RiskMapping make_mapping(const std::string& name) {
  if (name == "linear") return RiskMapping::linear();
  if (name == "entropic") return RiskMapping::entropic();
  if (name == "worst-case") return RiskMapping::worst_case();
  throw std::invalid_argument("unknown risk mapping: " + name);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_components(const std::vector<Component>& comps) {
  std::cout << "components: " << comps.size() << "\n";
  for (const auto& c : comps)
    std::cout << "  (" << num(c.x_minus) << ", " << num(c.x_plus) << ")  beta=" << num(c.h.beta)
              << " gamma=" << num(c.h.gamma) << "\n";
}

struct CommonOpts {
  std::string risk = "linear";
  std::string gain;
  int grid_n = 2001;
  std::string out;
  std::string components_path;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, const char* default_out) {
  cmd->add_option("--risk", o.risk, "linear | entropic | worst-case")->required();
  cmd->add_option("--gain", o.gain, "poly:c0,c1,... | sin:a,b,c,d | pwl:x0:y0,x1:y1,...")->required();
  cmd->add_option("--grid", o.grid_n, "grid points (>= 101)");
  o.out = default_out;
  cmd->add_option("--out", o.out, "output CSV path");
  cmd->add_option("--components", o.components_path, "also write components JSON here");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

Grid cli_grid(int n) {
  if (n < 101) throw std::invalid_argument("grid must have at least 101 points");
  return Grid::uniform(n);
}

int run_checked(int argc, char** argv) {
  CLI::App app{"Optimal stopping of absorbed Brownian motion under nonlinear expectations"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "value function and stopping region via tangency search");
  CommonOpts so;
  add_common(solve_cmd, so, "solution.csv");
  double solve_delta = 0.0;
  int solve_mesh = 401;
  bool diagnostics = false, check_majorant = false;
  solve_cmd->add_option("--delta", solve_delta, "sweep step (default 10 grid spacings)");
  solve_cmd->add_option("--mesh", solve_mesh, "tangency scan resolution");
  solve_cmd->add_flag("--diagnostics", diagnostics, "print tangency pairs and strictness probes");
  solve_cmd->add_flag("--check-majorant", check_majorant,
                      "cross-check against the majorant search on a coarse parameter lattice");

  auto* oracle_cmd = app.add_subcommand("oracle", "closed-form value function for a built-in mapping");
  CommonOpts oo;
  add_common(oracle_cmd, oo, "oracle.csv");

  auto* maj_cmd = app.add_subcommand("majorant", "pointwise minimum over dominating candidates");
  CommonOpts mo;
  add_common(maj_cmd, mo, "majorant.csv");
  int maj_res = 201;
  bool no_refine = false;
  maj_cmd->add_option("--param-res", maj_res, "parameter lattice resolution (>= 16)");
  maj_cmd->add_flag("--no-refine", no_refine, "skip local refinement of lattice minimizers");

  auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo check of a solution file");
  std::string v_risk, v_gain, v_solution;
  std::vector<double> v_x0{0.3, 0.5, 0.9};
  MCConfig mc_cfg;
  verify_cmd->add_option("--risk", v_risk)->required();
  verify_cmd->add_option("--gain", v_gain)->required();
  verify_cmd->add_option("--solution", v_solution, "CSV written by solve or oracle")->required();
  verify_cmd->add_option("--x0", v_x0, "start points to check");
  verify_cmd->add_option("--dt", mc_cfg.dt);
  verify_cmd->add_option("--paths", mc_cfg.n_paths);
  verify_cmd->add_option("--seed", mc_cfg.seed);
  verify_cmd->add_option("--tmax", mc_cfg.t_max);
  verify_cmd->add_option("--threads", mc_cfg.threads);

  auto* ax_cmd = app.add_subcommand("axioms", "randomized axiom check for a mapping");
  std::string a_risk;
  int a_trials = 1000;
  std::uint64_t a_seed = 42;
  bool a_diag = false;
  ax_cmd->add_option("--risk", a_risk)->required();
  ax_cmd->add_option("--trials", a_trials);
  ax_cmd->add_option("--seed", a_seed);
  ax_cmd->add_flag("--diagnostics", a_diag, "also probe strict monotonicity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (solve_cmd->parsed()) {
    RiskMapping rm = make_mapping(so.risk);
    GainSpec g = GainSpec::parse(so.gain);
    Grid grid = cli_grid(so.grid_n);
    SolveOptions opt;
    opt.delta = solve_delta;
    opt.mesh = solve_mesh;
    Solution sol = solve(rm, g, grid, opt);
    if (diagnostics) {
      auto pairs = find_tangency_pairs(rm, g, solve_mesh);
      std::cout << "tangency pairs: " << pairs.size() << "\n";
      for (const auto& p : pairs)
        std::cout << "  y=" << num(p.y) << " z=" << num(p.z) << " res=(" << num(p.residual_left)
                  << ", " << num(p.residual_right) << ")\n";
      AxiomCheck probe = probe_strict_monotonicity(rm, 200, 42);
      std::cout << "strict monotonicity probe: " << (probe.pass ? "strict" : "not strict") << "\n";
      if (!probe.pass) std::cout << "  " << probe.witness << "\n";
    }
    print_components(sol.components);
    if (check_majorant) {
      MajorantOptions mopt;
      mopt.param_res = 101;
      mopt.threads = so.threads;
      MajorantResult mr = compute_majorant(rm, g, grid, mopt);
      double sup = (mr.w - sol.table.values).abs().maxCoeff();
      std::cout << "majorant cross-check sup-difference: " << num(sup) << "\n";
    }
    write_solution_csv(so.out, g, sol.table);
    std::cout << "wrote " << so.out << "\n";
    if (!so.components_path.empty()) {
      write_components_json(so.components_path, sol.components);
      std::cout << "wrote " << so.components_path << "\n";
    }
    return 0;
  }

  if (oracle_cmd->parsed()) {
    RiskMapping rm = make_mapping(oo.risk);
    GainSpec g = GainSpec::parse(oo.gain);
    Grid grid = cli_grid(oo.grid_n);
    ValueTable table;
    switch (rm.kind()) {
      case RiskKind::Linear: table = linear_value(g, grid); break;
      case RiskKind::Entropic: table = entropic_value(g, grid); break;
      case RiskKind::WorstCase: table = worst_case_value(g, grid); break;
      case RiskKind::Custom: throw std::invalid_argument("no closed form for custom mappings");
    }
    Solution sol = solution_from_table(g, table);
    print_components(sol.components);
    write_solution_csv(oo.out, g, table);
    std::cout << "wrote " << oo.out << "\n";
    if (!oo.components_path.empty()) {
      write_components_json(oo.components_path, sol.components);
      std::cout << "wrote " << oo.components_path << "\n";
    }
    return 0;
  }

  if (maj_cmd->parsed()) {
    RiskMapping rm = make_mapping(mo.risk);
    GainSpec g = GainSpec::parse(mo.gain);
    Grid grid = cli_grid(mo.grid_n);
    MajorantOptions opt;
    opt.param_res = maj_res;
    opt.refine = !no_refine;
    opt.threads = mo.threads;
    MajorantResult mr = compute_majorant(rm, g, grid, opt);
    write_majorant_csv(mo.out, g, mr);
    std::cout << "wrote " << mo.out << "\n";
    return 0;
  }

  if (verify_cmd->parsed()) {
    RiskMapping rm = make_mapping(v_risk);
    GainSpec g = GainSpec::parse(v_gain);
    ValueTable table = read_solution_csv(v_solution);
    Solution sol = solution_from_table(g, table);
    bool all_pass = true;
    for (double x0 : v_x0) {
      VerifyReport rep = verify_solution(rm, g, sol, x0, mc_cfg);
      std::cout << "x0=" << num(x0) << "  V=" << num(rep.value_at_x0) << "\n";
      for (const auto& c : rep.checks) {
        std::cout << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.rule
                  << "  estimate=" << num(c.estimate) << "  se=" << num(c.std_error)
                  << "  bound=" << num(c.bound) << "\n";
        all_pass = all_pass && c.pass;
      }
    }
    return all_pass ? 0 : 1;
  }

  if (ax_cmd->parsed()) {
    RiskMapping rm = make_mapping(a_risk);
    AxiomReport rep = check_axioms(rm, a_trials, a_seed);
    for (const auto& c : rep.checks) {
      std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.axiom << "\n";
      if (!c.pass) std::cout << "  witness: " << c.witness << "\n";
    }
    if (a_diag) {
      AxiomCheck probe = probe_strict_monotonicity(rm, a_trials, a_seed);
      std::cout << "info  strict-monotonicity: " << (probe.pass ? "strict" : "not strict") << "\n";
      if (!probe.pass) std::cout << "  " << probe.witness << "\n";
    }
    return rep.all_pass() ? 0 : 1;
  }

  return 2;
}

}  // namespace

int run(int argc, char** argv) {
  try {
    return run_checked(argc, argv);
  } catch (const AssumptionViolation& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 3;
  } catch (const UnsupportedOperation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace nlstop
