#include <cstdio>
#include <fstream>
#include <sstream>

#include "vrmhd/io.hpp"

namespace vrmhd {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return in;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

[[noreturn]] void bad_file(const std::filesystem::path& path, const std::string& m) {
  throw Error(path.string() + ": " + m);
}

}  // namespace

// ---- VTK snapshot ----

void write_snapshot(const State& s, double gamma, const std::filesystem::path& path, const std::string& title) {
  const Grid& g = s.g;
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "t=" << g17(s.t) << " gamma=" << g17(gamma) << (title.empty() ? "" : " " + title) << '\n';
  out << "ASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.n[0] + 1 << ' ' << g.n[1] + 1 << ' ' << g.n[2] + 1 << '\n';
  out << "ORIGIN " << g17(g.lo[0]) << ' ' << g17(g.lo[1]) << ' ' << g17(g.lo[2]) << '\n';
  out << "SPACING " << g17(g.d[0]) << ' ' << g17(g.d[1]) << ' ' << g17(g.d[2]) << '\n';
  const std::size_t nc = g.size(Loc::Cell);
  out << "CELL_DATA " << nc << '\n';
  const auto scalar = [&](const char* name, const std::vector<double>& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out << g17(x) << '\n';
  };
  scalar("rho", s.rho.v);
  scalar("p", s.p.v);
  std::vector<double> e(nc);
  for (std::size_t q = 0; q < nc; ++q) e[q] = eos_internal_energy(s.p.v[q], s.rho.v[q], gamma);
  scalar("e", e);
  const auto vector = [&](const char* name, const Vec3Field& f) {
    out << "VECTORS " << name << " double\n";
    for (std::size_t q = 0; q < nc; ++q) out << g17(f[0].v[q]) << ' ' << g17(f[1].v[q]) << ' ' << g17(f[2].v[q]) << '\n';
  };
  Vec3Field v = cell_vec(g);
  for (int a = 0; a < 3; ++a)
    for (std::size_t q = 0; q < nc; ++q) v[a].v[q] = s.mom[a].v[q] / s.rho.v[q];
  vector("v", v);
  vector("B", cell_B(s.B_e));
  const NodeField d = div_e2n(s.B_e);
  out << "POINT_DATA " << std::size_t(g.n[0] + 1) * std::size_t(g.n[1] + 1) * std::size_t(g.n[2] + 1) << '\n';
  out << "SCALARS divB double 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k <= g.n[2]; ++k)
    for (int j = 0; j <= g.n[1]; ++j)
      for (int i = 0; i <= g.n[0]; ++i) out << g17(d.get(i, j, k)) << '\n';
  check_written(out, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  Snapshot s;
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) bad_file(path, "not a legacy VTK file");
  std::getline(in, line);
  if (const auto p = line.find("t="); p != std::string::npos) s.t = std::stod(line.substr(p + 2));
  std::size_t n_cells = 0, n_points = 0;
  bool in_points = false;
  for (std::string w; in >> w;) {
    if (w == "ASCII" || w == "DATASET" || w == "STRUCTURED_POINTS") continue;
    if (w == "DIMENSIONS") {
      in >> s.dims[0] >> s.dims[1] >> s.dims[2];
    } else if (w == "ORIGIN") {
      in >> s.origin[0] >> s.origin[1] >> s.origin[2];
    } else if (w == "SPACING") {
      in >> s.spacing[0] >> s.spacing[1] >> s.spacing[2];
    } else if (w == "CELL_DATA") {
      in >> n_cells;
      in_points = false;
    } else if (w == "POINT_DATA") {
      in >> n_points;
      in_points = true;
    } else if (w == "SCALARS") {
      std::string name, type, lt, lname;
      int ncomp = 1;
      in >> name >> type >> ncomp >> lt >> lname;
      const std::size_t n = in_points ? n_points : n_cells;
      std::vector<double> v(n);
      for (auto& x : v) {
        std::string t;
        in >> t;
        x = std::stod(t);
      }
      (in_points ? s.point_scalars : s.cell_scalars)[name] = std::move(v);
    } else if (w == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      std::array<std::vector<double>, 3> v;
      for (auto& c : v) c.resize(n_cells);
      for (std::size_t q = 0; q < n_cells; ++q)
        for (int c = 0; c < 3; ++c) {
          std::string t;
          in >> t;
          v[c][q] = std::stod(t);
        }
      s.cell_vectors[name] = std::move(v);
    } else {
      bad_file(path, "unexpected token '" + w + "'");
    }
    if (!in) bad_file(path, "truncated");
  }
  return s;
}

// ---- raw staggered dump ----

void write_raw(const State& s, const std::filesystem::path& path) {
  const Grid& g = s.g;
  std::ofstream out = open_out(path);
  out << "vrmhd-raw 1\n";
  out << "n " << g.n[0] << ' ' << g.n[1] << ' ' << g.n[2] << '\n';
  out << "lo " << g17(g.lo[0]) << ' ' << g17(g.lo[1]) << ' ' << g17(g.lo[2]) << '\n';
  out << "hi " << g17(g.hi[0]) << ' ' << g17(g.hi[1]) << ' ' << g17(g.hi[2]) << '\n';
  out << "bc";
  for (int a = 0; a < 3; ++a) out << ' ' << (g.periodic(a) ? "periodic" : "outflow");
  out << "\nt " << g17(s.t) << '\n';
  const auto field = [&](const std::string& name, const Field& f) {
    out << "field " << name << ' ' << loc_name(f.loc) << ' ' << f.v.size() << '\n';
    for (double x : f.v) out << g17(x) << '\n';
  };
  field("rho", s.rho);
  for (int a = 0; a < 3; ++a) field("mom" + std::to_string(a), s.mom[a]);
  field("rhoE", s.rhoE);
  field("p", s.p);
  for (int a = 0; a < 3; ++a) field("v_f" + std::to_string(a), s.v_f[a]);
  for (int a = 0; a < 3; ++a) field("B_e" + std::to_string(a), s.B_e[a]);
  check_written(out, path);
}

State read_raw(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string w;
  int ver = 0;
  in >> w >> ver;
  if (w != "vrmhd-raw" || ver != 1) bad_file(path, "not a raw dump");
  std::array<int, 3> n{};
  std::array<std::array<double, 2>, 3> ext{};
  std::array<Boundary, 3> bc{};
  double t = 0.0;
  in >> w >> n[0] >> n[1] >> n[2];
  in >> w >> ext[0][0] >> ext[1][0] >> ext[2][0];
  in >> w >> ext[0][1] >> ext[1][1] >> ext[2][1];
  in >> w;
  for (auto& b : bc) {
    std::string s;
    in >> s;
    b = s == "periodic" ? Boundary::Periodic : Boundary::Outflow;
  }
  in >> w >> t;
  if (!in) bad_file(path, "bad header");
  State s(make_grid(n, ext, bc));
  s.t = t;
  std::map<std::string, Field*> slots{{"rho", &s.rho}, {"rhoE", &s.rhoE}, {"p", &s.p}};
  for (int a = 0; a < 3; ++a) {
    slots["mom" + std::to_string(a)] = &s.mom[a];
    slots["v_f" + std::to_string(a)] = &s.v_f[a];
    slots["B_e" + std::to_string(a)] = &s.B_e[a];
  }
  while (in >> w) {
    if (w != "field") bad_file(path, "expected 'field'");
    std::string name, loc;
    std::size_t count = 0;
    in >> name >> loc >> count;
    const auto it = slots.find(name);
    if (it == slots.end()) bad_file(path, "unknown field " + name);
    Field& f = *it->second;
    if (count != f.v.size() || loc != loc_name(f.loc)) bad_file(path, "field " + name + " does not match the grid");
    for (auto& x : f.v) {
      std::string tok;
      in >> tok;
      x = std::stod(tok);
    }
    if (!in) bad_file(path, "truncated field " + name);
  }
  return s;
}

// ---- diagnostics ----

std::string diag_row(const DiagnosticsRecord& d) {
  std::string r = std::to_string(d.step);
  for (double x : {d.t, d.dt, d.dt_ratio, d.mass, d.mom[0], d.mom[1], d.mom[2], d.energy, d.mag_energy, d.divB_L1,
                   d.divB_L2, d.divB_Linf})
    r += ',' + g17(x);
  r += ',' + std::to_string(d.cg_iters_b) + ',' + std::to_string(d.cg_iters_p);
  return r;
}

void write_diag(const std::vector<DiagnosticsRecord>& series, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << kDiagHeader << '\n';
  for (const auto& d : series) out << diag_row(d) << '\n';
  check_written(out, path);
}

std::vector<DiagnosticsRecord> read_diag(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != kDiagHeader) bad_file(path, "unexpected diagnostics header");
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> c;
    for (std::string f; std::getline(ss, f, ',');) c.push_back(f);
    if (c.size() != 15) bad_file(path, "expected 15 columns");
    DiagnosticsRecord d;
    d.step = std::stol(c[0]);
    double* dst[] = {&d.t,      &d.dt,     &d.dt_ratio,   &d.mass,    &d.mom[0],  &d.mom[1],
                     &d.mom[2], &d.energy, &d.mag_energy, &d.divB_L1, &d.divB_L2, &d.divB_Linf};
    for (int i = 0; i < 12; ++i) *dst[i] = std::stod(c[1 + i]);
    d.cg_iters_b = std::stoi(c[13]);
    d.cg_iters_p = std::stoi(c[14]);
    out.push_back(d);
  }
  return out;
}

DiagWriter::DiagWriter(const std::filesystem::path& path) : path_(path), out_(open_out(path)) {
  out_ << kDiagHeader << '\n';
  check_written(out_, path_);
}

void DiagWriter::append(const DiagnosticsRecord& d) {
  out_ << diag_row(d) << '\n';
  check_written(out_, path_);
}

// ---- Jacobian dump ----

void write_jacobian(const JacobianReport& r, const std::filesystem::path& path) {
  const std::size_t n = std::size_t(r.n_dof);
  if (r.matrix.size() != n * n) throw Error("write_jacobian: report carries no matrix");
  std::ofstream out = open_out(path);
  out << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? " " : "") << g17(r.matrix[i * n + j]);
    out << '\n';
  }
  check_written(out, path);
}

std::vector<double> read_jacobian(const std::filesystem::path& path, int& n_dof) {
  std::ifstream in = open_in(path);
  if (!(in >> n_dof) || n_dof < 0) bad_file(path, "bad n_dof line");
  std::vector<double> m(std::size_t(n_dof) * std::size_t(n_dof));
  for (auto& x : m) {
    std::string t;
    if (!(in >> t)) bad_file(path, "truncated matrix");
    x = std::stod(t);
  }
  return m;
}

}  // namespace vrmhd
