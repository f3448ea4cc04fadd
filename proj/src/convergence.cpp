#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vrmhd/io.hpp"

namespace vrmhd {

namespace {

void accumulate(ErrorNorms& e, const Field& f, double V, const std::function<double(double, double, double)>& ref) {
  const Grid& g = f.g;
  const auto ext = g.extents(f.loc);
  std::size_t q = 0;
  double l2 = 0.0;
  for (int k = 0; k < ext[2]; ++k)
    for (int j = 0; j < ext[1]; ++j)
      for (int i = 0; i < ext[0]; ++i, ++q) {
        const double d = std::abs(f.v[q] - ref(g.coord(f.loc, 0, i), g.coord(f.loc, 1, j), g.coord(f.loc, 2, k)));
        e.L1 += d * V;
        l2 += d * d * V;
        e.Linf = std::max(e.Linf, d);
      }
  e.L2 = std::sqrt(l2);
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::map<std::string, ErrorNorms> reference_errors(const std::string& case_name, const State& s,
                                                   const std::map<std::string, double>& knobs) {
  const auto at = [&](double x, double y, double z) {
    const auto w = reference(case_name, {x, y, z}, s.t, knobs);
    if (!w) throw ConfigError("case '" + case_name + "' has no analytic reference");
    return *w;
  };
  at(s.g.lo[0], s.g.lo[1], s.g.lo[2]);
  const double V = s.g.cell_volume();
  std::map<std::string, ErrorNorms> out;
  accumulate(out["rho"], s.rho, V, [&](double x, double y, double z) { return at(x, y, z).rho; });
  accumulate(out["p"], s.p, V, [&](double x, double y, double z) { return at(x, y, z).p; });
  const char* vn[3] = {"vx", "vy", "vz"};
  const char* bn[3] = {"Bx", "By", "Bz"};
  for (int a = 0; a < 3; ++a) {
    accumulate(out[vn[a]], s.v_f[a], V, [&](double x, double y, double z) { return at(x, y, z).v[a]; });
    accumulate(out[bn[a]], s.B_e[a], V, [&](double x, double y, double z) { return at(x, y, z).B[a]; });
  }
  return out;
}

double ConvergenceTable::last_order(const std::string& var, int norm) const {
  const ConvergenceRow* last = nullptr;
  for (const auto& r : rows)
    if (r.var == var && r.order) last = &r;
  if (!last) throw ConfigError("no observed order for '" + var + "'");
  return (*last->order)[norm];
}

ConvergenceTable run_convergence(const RunConfig& base, int levels) {
  if (levels < 2) throw ConfigError("convergence: need at least 2 levels");
  const CaseInit probe = resolve_config(base);
  if (!probe.spec.has_reference) throw ConfigError("case '" + base.case_name + "' has no analytic reference");
  const std::array<int, 3> n0 = probe.spec.grid.n;
  ConvergenceTable table;
  table.case_name = base.case_name;
  std::vector<std::map<std::string, ErrorNorms>> errs;
  std::vector<int> ns;
  for (int l = 0; l < levels; ++l) {
    RunConfig c = base;
    std::array<int, 3> n = n0;
    for (int a = 0; a < 3; ++a)
      if (n0[a] > 1) n[a] = n0[a] << l;
    c.n = n;
    c.output_times.clear();
    c.output_every.reset();
    const CaseInit ci = resolve_config(c);
    const RunResult r = run(ci.state, ci.spec.params, ci.spec.t_end, {});
    if (!r.ok) throw SolverFailure("convergence level " + std::to_string(l) + ": " + r.error);
    errs.push_back(reference_errors(c.case_name, r.state, ci.spec.knobs));
    ns.push_back(n[0]);
  }
  for (const auto& var : convergence_vars())
    for (int l = 0; l < levels; ++l) {
      ConvergenceRow row;
      row.var = var;
      row.n = ns[l];
      row.err = errs[l].at(var);
      if (l > 0) {
        const ErrorNorms& p = errs[l - 1].at(var);
        const double ratio = double(ns[l]) / ns[l - 1];
        const auto ord = [&](double a, double b) { return std::log(a / b) / std::log(ratio); };
        row.order = std::array<double, 3>{ord(p.L1, row.err.L1), ord(p.L2, row.err.L2), ord(p.Linf, row.err.Linf)};
      }
      table.rows.push_back(row);
    }
  return table;
}

void write_convergence(const ConvergenceTable& t, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "var,n,L1,L2,Linf,order_L1,order_L2,order_Linf\n";
  for (const auto& r : t.rows) {
    out << r.var << ',' << r.n << ',' << g17(r.err.L1) << ',' << g17(r.err.L2) << ',' << g17(r.err.Linf);
    if (r.order)
      out << ',' << g17((*r.order)[0]) << ',' << g17((*r.order)[1]) << ',' << g17((*r.order)[2]);
    else
      out << ",,,";
    out << '\n';
  }
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

ConvergenceTable read_convergence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  ConvergenceTable t;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> c;
    for (std::string f; std::getline(ss, f, ',');) c.push_back(f);
    c.resize(8);
    ConvergenceRow r;
    r.var = c[0];
    r.n = std::stoi(c[1]);
    r.err = {std::stod(c[2]), std::stod(c[3]), std::stod(c[4])};
    if (!c[5].empty()) r.order = std::array<double, 3>{std::stod(c[5]), std::stod(c[6]), std::stod(c[7])};
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace vrmhd
