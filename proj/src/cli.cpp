#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include "vrmhd/io.hpp"

namespace vrmhd {

namespace {

std::string numbered(const std::string& stem, int idx, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04d", idx);
  return stem + buf + ext;
}

int cmd_run(const std::string& config_path, bool raw_flag) {
  const RunConfig cfg = load_config(config_path);
  const CaseInit ci = resolve_config(cfg);
  const std::filesystem::path dir = output_directory(cfg);
  std::filesystem::create_directories(dir);
  const bool raw = raw_flag || cfg.snapshot_format == "raw";
  const Params& pr = ci.spec.params;
  DiagWriter diag(dir / (cfg.case_name + "_diag.csv"));
  const auto on_output = [&](const State& s, int idx) {
    write_snapshot(s, pr.gamma, dir / numbered(cfg.case_name, idx, ".vtk"), "case=" + cfg.case_name);
    if (raw) write_raw(s, dir / numbered(cfg.case_name, idx, ".raw"));
  };
  const RunResult r =
      run(ci.state, pr, ci.spec.t_end, ci.spec.output_times, on_output, [&](const DiagnosticsRecord& d) { diag.append(d); });
  double peak = 0.0;
  for (const auto& d : r.diag) peak = std::max(peak, d.dt_ratio);
  std::cout << cfg.case_name << ": " << r.diag.size() << " steps, t=" << r.state.t << ", " << r.outputs
            << " snapshots, max dt_ratio " << peak << ", output in " << dir.string() << '\n';
  if (!r.ok) {
    std::cerr << "run failed: " << r.error << '\n';
    return 1;
  }
  return 0;
}

int cmd_convergence(const std::string& case_name, int levels, const std::string& var, const std::string& config_path) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  cfg.case_name = case_name;
  const auto& vars = convergence_vars();
  if (std::find(vars.begin(), vars.end(), var) == vars.end()) throw ConfigError("unknown order variable '" + var + "'");
  const ConvergenceTable t = run_convergence(cfg, levels);
  const std::filesystem::path dir = output_directory(cfg);
  const auto path = dir / (case_name + "_convergence.csv");
  write_convergence(t, path);
  std::printf("%-4s %6s %14s %14s %14s %8s %8s %8s\n", "var", "N", "L1", "L2", "Linf", "O(L1)", "O(L2)", "O(Linf)");
  for (const auto& r : t.rows) {
    std::printf("%-4s %6d %14.5E %14.5E %14.5E", r.var.c_str(), r.n, r.err.L1, r.err.L2, r.err.Linf);
    if (r.order)
      std::printf(" %8.2f %8.2f %8.2f\n", (*r.order)[0], (*r.order)[1], (*r.order)[2]);
    else
      std::printf(" %8s %8s %8s\n", "---", "---", "---");
  }
  std::printf("observed L2 order of %s: %.4f\ntable written to %s\n", var.c_str(), t.last_order(var, 1),
              path.string().c_str());
  return 0;
}

int cmd_stability(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const CaseInit ci = resolve_config(cfg);
  const Params& pr = ci.spec.params;
  const double dt = pr.dt_fixed > 0.0 ? pr.dt_fixed : compute_dt(ci.state, pr).dt;
  JacobianOptions jo;
  jo.eps = cfg.jacobian_eps;
  jo.power_iterations = cfg.power_iterations;
  jo.keep_matrix = cfg.dump_jacobian;
  const JacobianReport rep = jacobian_spectral(ci.state, pr, dt, jo);
  const std::filesystem::path dir = output_directory(cfg);
  std::filesystem::create_directories(dir);
  nlohmann::json j{{"case", cfg.case_name},
                   {"n_dof", rep.n_dof},
                   {"dt", dt},
                   {"theta_b", pr.theta_b},
                   {"theta_p", pr.theta_p},
                   {"eigen_set", eigen_set_name(pr.eigen_set)},
                   {"spectral_radius", rep.spectral_radius},
                   {"base_residual", rep.base_residual},
                   {"equilibrium_warning", rep.equilibrium_warning}};
  if (cfg.dump_jacobian) {
    const auto mpath = dir / (cfg.case_name + "_jacobian.txt");
    write_jacobian(rep, mpath);
    j["matrix_path"] = mpath.string();
  }
  const auto rpath = dir / (cfg.case_name + "_jacobian_report.json");
  std::ofstream(rpath) << j.dump(2) << '\n';
  std::cout << j.dump(2) << '\n';
  if (rep.equilibrium_warning) std::cerr << "warning: base state is not a discrete equilibrium\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Semi-implicit staggered MHD solver"};
  app.require_subcommand(1);

  std::string config;
  bool raw = false;
  auto* run_cmd = app.add_subcommand("run", "run a configured case");
  run_cmd->add_option("config", config, "configuration file")->required();
  run_cmd->add_flag("--raw", raw, "also dump staggered raw fields");

  std::string case_name, var = "Bx", conv_config;
  int levels = 3;
  auto* conv_cmd = app.add_subcommand("convergence", "refinement study against the analytic reference");
  conv_cmd->add_option("case", case_name, "case name")->required();
  conv_cmd->add_option("--levels", levels, "number of grids (spacing halved per level)")->check(CLI::Range(2, 8));
  conv_cmd->add_option("--order-var", var, "variable whose observed order is reported");
  conv_cmd->add_option("--config", conv_config, "configuration file with overrides");

  auto* stab_cmd = app.add_subcommand("stability", "spectral radius of the one-step Jacobian");
  stab_cmd->add_option("config", config, "configuration file")->required();

  app.add_subcommand("list-cases", "print the case catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*run_cmd) return cmd_run(config, raw);
    if (*conv_cmd) return cmd_convergence(case_name, levels, var, conv_config);
    if (*stab_cmd) return cmd_stability(config);
    for (const auto& n : case_catalog()) std::cout << n << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace vrmhd
