#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cases.hpp"
#include "driver.hpp"

namespace vrmhd {

// ---- run configuration ----

// Everything a run needs. Unset optionals fall back to the case defaults.
struct RunConfig {
  std::string case_name;
  std::optional<std::array<int, 3>> n;
  std::optional<std::array<double, 3>> lo, hi;
  std::map<std::string, std::string> params;  // Params overrides, canonical key -> canonical text
  std::map<std::string, double> knobs;        // case knobs (knob.<name>)
  std::optional<double> t_end;
  std::optional<double> output_every;
  std::vector<double> output_times;
  std::string output_dir = "out";
  std::string snapshot_format = "vtk";  // vtk | raw (raw also writes the vtk file)
  // stability subcommand
  bool dump_jacobian = false;
  double jacobian_eps = 1e-7;
  int power_iterations = 200;

  bool operator==(const RunConfig&) const = default;
};

// Keys accepted by parse_config, in emit order.
const std::vector<std::string>& config_keys();

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string emit_config(const RunConfig& c);

// Case defaults with the configuration overrides applied.
CaseInit resolve_config(const RunConfig& c);
std::vector<double> resolve_output_times(const RunConfig& c, const CaseSpec& spec, double t_end);

// Output directory: SOLVER_OUT when set, else the configured one.
std::filesystem::path output_directory(const RunConfig& c);

// ---- snapshots ----

// Legacy VTK structured points: cell scalars rho, p, e (specific internal energy), cell-averaged
// vectors v and B, node scalar divB. Periodic wrap nodes are repeated on the closing points.
void write_snapshot(const State& s, double gamma, const std::filesystem::path& path, const std::string& title = "");

struct Snapshot {
  std::array<int, 3> dims{0, 0, 0};  // point counts
  std::array<double, 3> origin{0, 0, 0};
  std::array<double, 3> spacing{0, 0, 0};
  double t = 0.0;
  std::map<std::string, std::vector<double>> cell_scalars;
  std::map<std::string, std::array<std::vector<double>, 3>> cell_vectors;
  std::map<std::string, std::vector<double>> point_scalars;
};

Snapshot read_snapshot(const std::filesystem::path& path);

// Staggered raw dump: every stored field at its native location, enough to restart.
void write_raw(const State& s, const std::filesystem::path& path);
State read_raw(const std::filesystem::path& path);

// ---- diagnostics ----

inline constexpr const char* kDiagHeader =
    "step,t,dt,dt_ratio,mass,momx,momy,momz,energy,mag_energy,divB_L1,divB_L2,divB_Linf,cg_iters_b,cg_iters_p";

std::string diag_row(const DiagnosticsRecord& d);
void write_diag(const std::vector<DiagnosticsRecord>& series, const std::filesystem::path& path);
std::vector<DiagnosticsRecord> read_diag(const std::filesystem::path& path);

// Appends one row per call and flushes, so a failed run keeps every completed step.
class DiagWriter {
 public:
  explicit DiagWriter(const std::filesystem::path& path);
  void append(const DiagnosticsRecord& d);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// ---- convergence ----

struct ErrorNorms {
  double L1 = 0.0, L2 = 0.0, Linf = 0.0;
};

// Errors against the case reference at the native location of each variable:
// rho, p at cells; vx, vy, vz at faces; Bx, By, Bz at edges. Norms are volume weighted.
std::map<std::string, ErrorNorms> reference_errors(const std::string& case_name, const State& s,
                                                   const std::map<std::string, double>& knobs = {});

inline const std::vector<std::string>& convergence_vars() {
  static const std::vector<std::string> v{"rho", "vx", "vy", "vz", "p", "Bx", "By", "Bz"};
  return v;
}

struct ConvergenceRow {
  std::string var;
  int n = 0;  // cells along the first axis
  ErrorNorms err;
  std::optional<std::array<double, 3>> order;  // L1, L2, Linf against the previous level
};

struct ConvergenceTable {
  std::string case_name;
  std::vector<ConvergenceRow> rows;
  // observed order of var in the given norm (0 = L1, 1 = L2, 2 = Linf) between the last two levels
  double last_order(const std::string& var, int norm = 1) const;
};

// Refinement ladder: the base grid and levels-1 successive halvings of the spacing.
ConvergenceTable run_convergence(const RunConfig& base, int levels);
void write_convergence(const ConvergenceTable& t, const std::filesystem::path& path);
ConvergenceTable read_convergence(const std::filesystem::path& path);

// ---- Jacobian ----

// First line n_dof, then n_dof rows of space-separated values (17 significant digits).
void write_jacobian(const JacobianReport& r, const std::filesystem::path& path);
std::vector<double> read_jacobian(const std::filesystem::path& path, int& n_dof);

// ---- command line ----

int cli_main(int argc, char** argv);

}  // namespace vrmhd
