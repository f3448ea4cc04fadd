#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>

#include "test_support.hpp"
#include "vrmhd/io.hpp"

using namespace vrmhd;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vrmhd_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vrmhd");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(int(argv.size()), argv.data());
}

}  // namespace

TEST(Config, RiemannExample) {
  const RunConfig c = parse_config("case=rp1\ncfl=0.9\ntheta_b=0.55");
  const CaseInit ci = resolve_config(c);
  EXPECT_EQ(ci.spec.params.cfl, 0.9);
  EXPECT_EQ(ci.spec.params.theta_b, 0.55);
  EXPECT_EQ(ci.spec.params.theta_p, 1.0);
  EXPECT_EQ(ci.state.rho.v.front(), 1.0);
  EXPECT_EQ(ci.state.rho.v.back(), 0.125);
  EXPECT_EQ(ci.spec.t_end, 0.1);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config(""), ConfigError);
  EXPECT_THROW(parse_config("# only a comment\n"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\ncfl=2.0"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\ncfl=0"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\ncfll=0.9"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\ncfl=fast"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\npicard_R=1.5"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\nlimiter=maybe"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\neigen_set=W"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\ncfl=0.5\ncfl=0.6"), ConfigError);
  EXPECT_THROW(parse_config("case=rp1\njust words"), ConfigError);
  EXPECT_THROW(resolve_config(parse_config("case=nonexistent")), ConfigError);
  EXPECT_THROW(resolve_config(parse_config("case=rp1\ntheta_b=0.2")), InvalidParams);
  try {
    parse_config("case=rp1\n\nbogus=1\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, CommentsSectionsAndWhitespace) {
  const RunConfig c = parse_config("# header\n[run]\n  case = rotor   # trailing\n[grid]\nn = 40, 40\n\nknob.omega=5\n");
  EXPECT_EQ(c.case_name, "rotor");
  EXPECT_EQ(*c.n, (std::array<int, 3>{40, 40, 1}));
  EXPECT_EQ(c.knobs.at("omega"), 5.0);
}

TEST(Config, RoundTrips) {
  const std::vector<std::string> texts{
      "case=rp1",
      "case=alfven_wave\nn=20 20\ncfl=0.75\ntheta_b=0.5\ntheta_p=0.5\nlimiter=off\neigen_set=VB\nt_end=0.1",
      "case=rotor\nlo=-1 -1 0\nhi=1 1 1\noutput_times=0.1, 0.2\nknob.bx=12.5\nmu=1e-3\nPr=0.72\ncv=1",
      "case=current_sheet\ndt_fixed=10\nline_precond=yes\noutput_every=250\nsnapshot_format=raw\noutput_dir=x/y",
      "case=stability_equilibrium\ndump_jacobian=true\njacobian_eps=1e-6\npower_iterations=50\ncg_tol=1e-12\n"
      "cg_maxit=300\npicard_R=3\npicard_S=1\nalpha=0.5\ngamma=1.4\neta=0.01\ndt_max=0.1\nsecond_order=1"};
  for (const auto& t : texts) {
    const RunConfig a = parse_config(t);
    const RunConfig b = parse_config(emit_config(a));
    EXPECT_EQ(a, b) << t;
    EXPECT_EQ(emit_config(a), emit_config(b));
  }
}

TEST(Config, OverridesReachTheState) {
  const CaseInit ci = resolve_config(parse_config("case=orszag_tang\nn=8 8\ngamma=1.4\nlo=0 0 0\nhi=1 1 1\nt_end=0.2"));
  EXPECT_EQ(ci.state.g.n[0], 8);
  EXPECT_DOUBLE_EQ(ci.state.g.hi[0], 1.0);
  EXPECT_EQ(ci.spec.params.gamma, 1.4);
  EXPECT_EQ(ci.spec.t_end, 0.2);
  EXPECT_EQ(ci.spec.output_times.back(), 0.2);
}

TEST(Config, OutputSchedule) {
  CaseSpec spec;
  spec.output_times = {0.25, 0.5};
  RunConfig c;
  EXPECT_EQ(resolve_output_times(c, spec, 0.5), (std::vector<double>{0.25, 0.5}));
  EXPECT_EQ(resolve_output_times(c, spec, 0.3), (std::vector<double>{0.25, 0.3}));
  c.output_every = 0.1;
  EXPECT_EQ(resolve_output_times(c, spec, 0.3).size(), 3u);
  c.output_times = {0.05};
  EXPECT_EQ(resolve_output_times(c, spec, 0.3), (std::vector<double>{0.05, 0.3}));
}

TEST(Config, SolverOutOverridesDirectory) {
  RunConfig c;
  c.output_dir = "configured";
  ::unsetenv("SOLVER_OUT");
  EXPECT_EQ(output_directory(c), fs::path("configured"));
  ::setenv("SOLVER_OUT", "/tmp/elsewhere", 1);
  EXPECT_EQ(output_directory(c), fs::path("/tmp/elsewhere"));
  ::unsetenv("SOLVER_OUT");
}

TEST(Snapshot, UniformStateColumnsConstant) {
  const fs::path d = scratch("uniform");
  const Grid g = make_grid({4, 3, 1}, {{{0, 1}, {0, 1}, {0, 1}}});
  Params pr;
  const State s = uniform_state(g, pr, {1.5, {0.1, 0.2, 0.3}, 2.0, {1, -1, 0.5}});
  write_snapshot(s, pr.gamma, d / "u.vtk");
  const Snapshot r = read_snapshot(d / "u.vtk");
  EXPECT_EQ(r.dims, (std::array<int, 3>{5, 4, 2}));
  for (const auto& [name, v] : r.cell_scalars)
    for (double x : v) EXPECT_EQ(x, v.front()) << name;
  for (double x : r.cell_vectors.at("B")[0]) EXPECT_DOUBLE_EQ(x, 1.0);
  for (double x : r.cell_vectors.at("v")[2]) EXPECT_DOUBLE_EQ(x, 0.3);
  ASSERT_EQ(r.point_scalars.at("divB").size(), 40u);
  for (double x : r.point_scalars.at("divB")) EXPECT_EQ(x, 0.0);
  EXPECT_DOUBLE_EQ(r.cell_scalars.at("e")[0], 2.0 / (1.5 * (pr.gamma - 1)));
}

TEST(Snapshot, RoundTripIsLossless) {
  const fs::path d = scratch("roundtrip");
  CaseOptions o;
  o.n = std::array<int, 3>{9, 7, 1};
  const CaseInit ci = init_case("orszag_tang_vr", o);
  State s = ci.state;
  s.t = 0.123456789012345678;
  write_snapshot(s, ci.spec.params.gamma, d / "s.vtk", "case=orszag_tang_vr");
  const Snapshot r = read_snapshot(d / "s.vtk");
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.cell_scalars.at("rho"), s.rho.v);
  EXPECT_EQ(r.cell_scalars.at("p"), s.p.v);
  const Vec3Field Bc = cell_B(s.B_e);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(r.cell_vectors.at("B")[a], Bc[a].v);
  EXPECT_EQ(r.spacing[0], s.g.d[0]);
}

TEST(Snapshot, RawDumpRestoresState) {
  const fs::path d = scratch("raw");
  CaseOptions o;
  o.n = std::array<int, 3>{30, 1, 1};
  const CaseInit ci = init_case("rp2", o);
  const State s = step(ci.state, ci.spec.params).state;
  write_raw(s, d / "s.raw");
  const State r = read_raw(d / "s.raw");
  EXPECT_TRUE(r.g == s.g);
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.rho.v, s.rho.v);
  EXPECT_EQ(r.rhoE.v, s.rhoE.v);
  EXPECT_EQ(r.p.v, s.p.v);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(r.mom[a].v, s.mom[a].v);
    EXPECT_EQ(r.v_f[a].v, s.v_f[a].v);
    EXPECT_EQ(r.B_e[a].v, s.B_e[a].v);
  }
  // restarting from the dump reproduces the next step bit for bit
  const State a = step(s, ci.spec.params).state, b = step(r, ci.spec.params).state;
  EXPECT_EQ(a.rhoE.v, b.rhoE.v);
}

TEST(Diagnostics, ThreeStepRunGivesThreeRows) {
  const fs::path d = scratch("diag");
  CaseOptions o;
  o.n = std::array<int, 3>{100, 1, 1};
  const CaseInit ci = init_case("rp1", o);
  State s = ci.state;
  std::vector<DiagnosticsRecord> series;
  for (int k = 0; k < 3; ++k) {
    StepResult r = step(s, ci.spec.params);
    r.diag.step = k + 1;
    series.push_back(r.diag);
    s = r.state;
  }
  write_diag(series, d / "d.csv");
  std::ifstream in(d / "d.csv");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], kDiagHeader);
  const auto back = read_diag(d / "d.csv");
  ASSERT_EQ(back.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(back[k].t, series[k].t);
    EXPECT_EQ(back[k].energy, series[k].energy);
    EXPECT_EQ(back[k].cg_iters_p, series[k].cg_iters_p);
  }
}

TEST(Diagnostics, RiemannMassAudit) {
  CaseOptions o;
  o.n = std::array<int, 3>{100, 1, 1};
  CaseInit ci = init_case("rp1", o);
  // fast waves leave the domain before t_end: mass changes only by the outflow tally
  const RunResult r = run(ci.state, ci.spec.params, ci.spec.t_end, {});
  ASSERT_TRUE(r.ok);
  for (const auto& d : r.diag) EXPECT_LE(d.cons_err_mass, 1e-12) << d.step;
  // with the full eigen set the first steps keep every wave interior: mass column constant
  ci.spec.params.eigen_set = EigenSet::FULL;
  State s = ci.state;
  const double m0 = totals(s).mass;
  for (int k = 0; k < 10; ++k) {
    const StepResult st = step(s, ci.spec.params);
    EXPECT_NEAR(st.diag.mass, m0, 1e-12 * m0);
    s = st.state;
  }
}

TEST(Diagnostics, StreamingWriterFlushesEachRow) {
  const fs::path d = scratch("stream");
  DiagWriter w(d / "s.csv");
  DiagnosticsRecord r;
  r.step = 1;
  r.t = 1.0 / 3.0;
  w.append(r);
  const auto back = read_diag(d / "s.csv");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].t, 1.0 / 3.0);
}

TEST(Jacobian, DumpRoundTrip) {
  const fs::path d = scratch("jac");
  JacobianReport r;
  r.n_dof = 3;
  r.matrix = {1, 2, 3, 4, 5, 6, 7, 8, 1.0 / 7.0};
  write_jacobian(r, d / "j.txt");
  std::ifstream in(d / "j.txt");
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "3");
  int n = 0;
  EXPECT_EQ(read_jacobian(d / "j.txt", n), r.matrix);
  EXPECT_EQ(n, 3);
  JacobianReport empty;
  empty.n_dof = 2;
  EXPECT_THROW(write_jacobian(empty, d / "k.txt"), Error);
}

TEST(Convergence, ErrorsVanishAtSamplingTime) {
  CaseOptions o;
  o.n = std::array<int, 3>{10, 10, 1};
  const CaseInit ci = init_case("isodensity_vortex", o);
  for (const auto& [var, e] : reference_errors("isodensity_vortex", ci.state, ci.spec.knobs)) {
    if (var == "Bx" || var == "By") continue;  // B is the discrete curl of the potential
    EXPECT_LE(e.Linf, 1e-14) << var;
  }
  EXPECT_THROW(reference_errors("rp1", ci.state), ConfigError);
}

TEST(Convergence, TableRoundTripAndOrders) {
  const fs::path d = scratch("conv");
  RunConfig c;
  c.case_name = "alfven_wave";
  c.n = std::array<int, 3>{8, 8, 1};
  c.t_end = 0.05;
  const ConvergenceTable t = run_convergence(c, 2);
  ASSERT_EQ(t.rows.size(), 2 * convergence_vars().size());
  write_convergence(t, d / "t.csv");
  const ConvergenceTable r = read_convergence(d / "t.csv");
  ASSERT_EQ(r.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].var, t.rows[i].var);
    EXPECT_EQ(r.rows[i].err.L2, t.rows[i].err.L2);
    if (i % 2 == 1) {
      // independent re-derivation of the order from the printed errors
      const double o = std::log2(r.rows[i - 1].err.L2 / r.rows[i].err.L2);
      if (std::isfinite(o))
        EXPECT_NEAR((*r.rows[i].order)[1], o, 1e-12);
      else
        EXPECT_EQ((*r.rows[i].order)[1], o);  // exact zero error on the coarse level
    }
  }
  EXPECT_GT(t.last_order("Bx"), 1.0);
  EXPECT_THROW(run_convergence(c, 1), ConfigError);
  c.case_name = "rotor";
  EXPECT_THROW(run_convergence(c, 2), ConfigError);
}

TEST(Cli, ListCasesAndUsage) {
  EXPECT_EQ(cli({"list-cases"}), 0);
  EXPECT_NE(cli({}), 0);
  EXPECT_NE(cli({"frobnicate"}), 0);
}

TEST(Cli, RunZeroEndTimeWritesInitialSnapshotOnly) {
  const fs::path d = scratch("cli_run0");
  write_text(d / "c.cfg", "case=orszag_tang\nn=8 8\nt_end=0\noutput_dir=" + (d / "out").string() + "\n");
  ::unsetenv("SOLVER_OUT");
  EXPECT_EQ(cli({"run", (d / "c.cfg").string()}), 0);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(d / "out")) files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  EXPECT_EQ(files, (std::vector<std::string>{"orszag_tang_0000.vtk", "orszag_tang_diag.csv"}));
  EXPECT_TRUE(read_diag(d / "out" / "orszag_tang_diag.csv").empty());
}

TEST(Cli, RunWritesSnapshotsAndDiagnosticsUnderSolverOut) {
  const fs::path d = scratch("cli_run");
  write_text(d / "c.cfg", "case=rp1\nn=100\noutput_times=0.05\n");
  ::setenv("SOLVER_OUT", (d / "env").string().c_str(), 1);
  EXPECT_EQ(cli({"run", (d / "c.cfg").string(), "--raw"}), 0);
  ::unsetenv("SOLVER_OUT");
  EXPECT_FALSE(fs::exists("out"));
  for (const char* f : {"rp1_0000.vtk", "rp1_0001.vtk", "rp1_0002.vtk", "rp1_0002.raw", "rp1_diag.csv"})
    EXPECT_TRUE(fs::exists(d / "env" / f)) << f;
  EXPECT_EQ(read_snapshot(d / "env" / "rp1_0002.vtk").t, 0.1);
  EXPECT_EQ(read_raw(d / "env" / "rp1_0002.raw").t, 0.1);
}

TEST(Cli, FailingRunExitsNonZeroAndKeepsLastSnapshot) {
  const fs::path d = scratch("cli_fail");
  write_text(d / "c.cfg", "case=orszag_tang\nn=8 8\ncg_maxit=1\ncg_tol=1e-15\noutput_dir=" + (d / "o").string() + "\n");
  EXPECT_EQ(cli({"run", (d / "c.cfg").string()}), 1);
  EXPECT_TRUE(fs::exists(d / "o" / "orszag_tang_0001.vtk"));
}

TEST(Cli, StabilityAndConvergenceSubcommands) {
  const fs::path d = scratch("cli_stab");
  write_text(d / "s.cfg", "case=stability_equilibrium\nn=4 4\ndump_jacobian=true\npower_iterations=30\noutput_dir=" +
                              (d / "o").string() + "\n");
  EXPECT_EQ(cli({"stability", (d / "s.cfg").string()}), 0);
  int n = 0;
  EXPECT_EQ(read_jacobian(d / "o" / "stability_equilibrium_jacobian.txt", n).size(), 128u * 128u);
  EXPECT_TRUE(fs::exists(d / "o" / "stability_equilibrium_jacobian_report.json"));
  write_text(d / "a.cfg", "case=alfven_wave\nn=8 8\nt_end=0.02\noutput_dir=" + (d / "c").string() + "\n");
  EXPECT_EQ(cli({"convergence", "alfven_wave", "--levels", "2", "--order-var", "Bx", "--config", (d / "a.cfg").string()}), 0);
  EXPECT_TRUE(fs::exists(d / "c" / "alfven_wave_convergence.csv"));
  EXPECT_NE(cli({"convergence", "alfven_wave", "--levels", "2", "--order-var", "nope"}), 0);
}
