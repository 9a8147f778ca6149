#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vikit/harness.hpp"
#include "vikit/json_io.hpp"

namespace fs = std::filesystem;
using namespace vikit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitInvalidParams = 3;

int exit_for_run(const RunReport& rep) {
  return rep.converged ? kExitOk : kExitNoConvergence;
}

std::string run_id_for(const VIProblem& p, const SolverConfig& cfg) {
  const std::string gen = p.generator.empty() ? "problem" : p.generator;
  return gen + "_m" + std::to_string(p.m) + "_k" + std::to_string(p.k) + "_s" +
         std::to_string(p.seed) + "_" + to_string(cfg.algorithm);
}

int cmd_solve(const std::string& problem_path, const std::string& config_path,
              const std::string& out_dir, std::optional<double> eps_x,
              std::optional<double> eps_r, std::optional<long> max_iter,
              bool check_inv, const std::string& start_name) {
  const VIProblem problem = load_problem(problem_path);
  SolverConfig cfg = load_config(config_path);
  if (eps_x) cfg.stopping.eps_x_norm = *eps_x;
  if (eps_r) {
    cfg.stopping.eps_residual = *eps_r;
    if (!eps_x) cfg.stopping.eps_x_norm.reset();
  }
  if (max_iter) cfg.stopping.max_iter = *max_iter;
  if (check_inv) cfg.check_invariants = true;
  if (start_name == "ones") {
    cfg.start = {StartPoint::Kind::ones, {}};
  } else if (start_name == "e1") {
    cfg.start = {StartPoint::Kind::e1, {}};
  } else if (!start_name.empty()) {
    throw ConfigError("solve: --start must be ones or e1");
  }

  const RunReport rep = solve(problem, cfg);

  fs::create_directories(out_dir);
  const std::string run_id = run_id_for(problem, cfg);
  {
    std::ofstream out(fs::path(out_dir) / "report.json");
    if (!out) throw IoError("cannot write report.json under '" + out_dir + "'");
    out << report_to_json(rep).dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(out_dir) / "history.csv");
    if (!out) throw IoError("cannot write history.csv under '" + out_dir + "'");
    write_history_csv(out, run_id, to_string(cfg.algorithm), rep.history);
  }
  std::cout << "run " << run_id << ": " << rep.termination << " after " << rep.iterations
            << " iterations (inner evals " << rep.inner_evals << ", final |x| "
            << norm(rep.final_x) << ")\n";
  if (rep.invariants.enabled) {
    std::cout << "invariant violations: " << rep.invariants.total() << "\n";
  }
  return exit_for_run(rep);
}

int cmd_reproduce(const std::string& which, const std::string& spec_path,
                  const std::string& scale, const std::string& out_dir) {
  ExperimentSpec spec;
  if (!spec_path.empty()) {
    spec = load_experiment(spec_path);
    if (!out_dir.empty()) spec.output_dir = out_dir;
  } else if (which == "example1") {
    spec = example1_spec(out_dir);
  } else if (which == "example2") {
    if (scale != "desk" && scale != "paper") {
      throw ConfigError("reproduce: --scale must be desk or paper");
    }
    spec = example2_spec(out_dir, scale == "paper");
  } else {
    throw ConfigError("reproduce: expected example1, example2 or --spec FILE");
  }
  if (spec.output_dir.empty()) throw ConfigError("reproduce: --out is required");

  const ComparisonTable table = run_experiment(spec);
  long converged = 0, failed = 0;
  for (const TableRow& r : table.rows) {
    if (!r.error.empty()) {
      ++failed;
    } else if (r.converged) {
      ++converged;
    }
  }
  std::cout << spec.name << ": " << table.rows.size() << " runs, " << converged
            << " converged, " << failed << " raised errors; outputs in " << spec.output_dir
            << "\n";
  for (const DimPair& d : spec.dims) {
    std::cout << "  m=" << d.m << " k=" << d.k << " median iter:";
    for (const AlgorithmVariant& v : spec.variants) {
      std::cout << ' ' << v.label << '=' << table.median_iter(d.m, d.k, v.label);
    }
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_validate_params(double alpha, double sigma, double delta, double beta) {
  const ParamCheck chk = validate_params(alpha, sigma, delta, beta);
  std::cout << "delta bound: " << chk.delta_bound << " (delta = " << delta << ")\n"
            << "beta bound:  " << chk.beta_bound << " (beta = " << beta << ")\n"
            << "margin:      " << chk.margin << "\n"
            << (chk.valid ? "valid" : "invalid") << "\n";
  return chk.valid ? kExitOk : kExitInvalidParams;
}

int cmd_gen_instance(const std::string& generator, std::size_t m, std::size_t k,
                     std::uint64_t seed, bool pseudo, const std::string& out_path) {
  VIProblem p = generator == "hp" ? make_hp_instance(m, k, seed) : make_antidiagonal(m);
  if (pseudo) p = make_pseudomonotone_scaled(p);
  save_problem(out_path, p);
  std::cout << "wrote " << p.generator << " instance (m=" << p.m << ", k=" << p.k
            << ", seed=" << p.seed << ") to " << out_path << "\n";
  return kExitOk;
}

int cmd_check_invariants(const std::string& problem_path, const std::string& config_path) {
  const VIProblem problem = load_problem(problem_path);
  if (!problem.known_solution) {
    throw ConfigError("check-invariants: the problem carries no known solution");
  }
  SolverConfig cfg =
      config_path.empty() ? default_config_for(Algorithm::alg1) : load_config(config_path);
  cfg.check_invariants = true;
  const RunReport rep = solve(problem, cfg);
  const InvariantReport& inv = rep.invariants;
  if (!inv.enabled) {
    throw ConfigError("check-invariants: config must use the inertial method family");
  }
  std::cout << "termination: " << rep.termination << " after " << rep.iterations
            << " iterations\n"
            << "checked iterations:        " << inv.checked_iterations << "\n"
            << "line-search certificate:   " << inv.linesearch_cert_violations << "\n"
            << "half-space cut depth:      " << inv.halfspace_gap_violations << "\n"
            << "solution cut membership:   " << inv.solution_cut_violations << "\n"
            << "distance decrease:         " << inv.distance_decrease_violations << "\n"
            << "rate bound"
            << (inv.rate_checked ? ":                " : " (not checked):  ")
            << inv.rate_bound_violations << "\n"
            << "total violations:          " << inv.total() << "\n";
  for (const std::string& s : inv.samples) std::cout << "  " << s << "\n";
  if (inv.total() > 0) return kExitInvalidParams;
  return exit_for_run(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection-type solvers for monotone variational inequalities"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver on one problem file");
  std::string problem_path, config_path, out_dir = ".", start_name;
  std::optional<double> eps_x, eps_r;
  std::optional<long> max_iter_override;
  bool check_inv = false;
  solve_cmd->add_option("--problem", problem_path, "Problem instance JSON")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--config", config_path, "Solver config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--out", out_dir, "Output directory (report.json, history.csv)");
  auto* ox = solve_cmd->add_option("--eps-x-norm", eps_x, "Override: stop when |x| <= eps");
  auto* orr = solve_cmd->add_option("--eps-residual", eps_r,
                                    "Override: stop when the step residual <= eps");
  ox->excludes(orr);
  solve_cmd->add_option("--max-iter", max_iter_override, "Override: iteration cap");
  solve_cmd->add_flag("--check-invariants", check_inv,
                      "Verify per-iteration inequalities against the known solution");
  solve_cmd->add_option("--start", start_name, "Start point: ones or e1");

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "Run a canned or custom experiment sweep");
  std::string which, spec_path, scale = "desk", rep_out;
  rep_cmd->add_option("example", which, "example1 or example2");
  rep_cmd->add_option("--spec", spec_path, "Custom experiment spec JSON")
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--scale", scale, "example2 size: desk or paper");
  rep_cmd->add_option("--out", rep_out, "Output directory")->required();

  // validate-params
  auto* val_cmd = app.add_subcommand("validate-params",
                                     "Check the inertial parameter cluster");
  double v_alpha = 0.0, v_sigma = 0.0, v_delta = 0.0, v_beta = 0.0;
  val_cmd->add_option("--alpha", v_alpha, "Inertia cap")->required();
  val_cmd->add_option("--sigma", v_sigma, "Line-search factor")->required();
  val_cmd->add_option("--delta", v_delta, "Auxiliary constant")->required();
  val_cmd->add_option("--beta", v_beta, "Slack constant")->required();

  // gen-instance
  auto* gen_cmd = app.add_subcommand("gen-instance", "Generate a problem instance file");
  std::string g_name = "hp", g_out;
  std::size_t g_m = 0, g_k = 0;
  std::uint64_t g_seed = 0;
  bool g_pseudo = false;
  gen_cmd->add_option("--generator", g_name, "hp or antidiagonal")
      ->check(CLI::IsMember({"hp", "antidiagonal"}));
  gen_cmd->add_option("--m", g_m, "Dimension")->required();
  gen_cmd->add_option("--k", g_k, "Constraint count (hp only)");
  gen_cmd->add_option("--seed", g_seed, "Seed (hp only)");
  gen_cmd->add_flag("--pseudo", g_pseudo, "Wrap with the pseudo-monotone scalar field");
  gen_cmd->add_option("--out", g_out, "Output JSON path")->required();

  // check-invariants
  auto* chk_cmd = app.add_subcommand("check-invariants",
                                     "Solve and verify per-iteration inequalities");
  std::string c_problem, c_config;
  chk_cmd->add_option("--problem", c_problem, "Problem instance JSON")
      ->required()
      ->check(CLI::ExistingFile);
  chk_cmd->add_option("--config", c_config, "Solver config JSON (default: inertial method)")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) {
      return cmd_solve(problem_path, config_path, out_dir, eps_x, eps_r, max_iter_override,
                       check_inv, start_name);
    }
    if (rep_cmd->parsed()) return cmd_reproduce(which, spec_path, scale, rep_out);
    if (val_cmd->parsed()) return cmd_validate_params(v_alpha, v_sigma, v_delta, v_beta);
    if (gen_cmd->parsed()) {
      if (g_name == "hp" && g_k == 0) {
        throw ConfigError("gen-instance: hp generator needs --k");
      }
      return cmd_gen_instance(g_name, g_m, g_k, g_seed, g_pseudo, g_out);
    }
    if (chk_cmd->parsed()) return cmd_check_invariants(c_problem, c_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
