#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "explicit.hpp"
#include "fields.hpp"
#include "implicit_b.hpp"
#include "implicit_p.hpp"
#include "ops.hpp"

namespace vrmhd {

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double dt_ratio = 0.0;
  double mass = 0.0;
  std::array<double, 3> mom{0.0, 0.0, 0.0};
  double energy = 0.0;
  double mag_energy = 0.0;
  double divB_L1 = 0.0;
  double divB_L2 = 0.0;
  double divB_Linf = 0.0;
  int cg_iters_b = 0;
  int cg_iters_p = 0;
  // Relative conservation defect of the step, boundary outflow included.
  double cons_err_mass = 0.0;
  double cons_err_mom = 0.0;
  double cons_err_energy = 0.0;
  // Picard increments of the magnetic field: |B^{r=2} - B^{r=1}| and |B^{r=1} - B^n| (max norm).
  double picard_dB2 = 0.0;
  double picard_dB1 = 0.0;
};

struct Totals {
  double mass = 0.0;
  std::array<double, 3> mom{0.0, 0.0, 0.0};
  double energy = 0.0;
  double mag_energy = 0.0;
};

inline double field_sum(const Field& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s;
}

inline Totals totals(const State& s) {
  const double V = s.g.cell_volume();
  Totals t;
  t.mass = field_sum(s.rho) * V;
  for (int a = 0; a < 3; ++a) t.mom[a] = field_sum(s.mom[a]) * V;
  t.energy = field_sum(s.rhoE) * V;
  t.mag_energy = field_sum(magnetic_energy_cell(s.B_e)) * V;
  return t;
}

struct DivNorms {
  double L1 = 0.0, L2 = 0.0, Linf = 0.0;
};

inline DivNorms div_norms(const EdgeField& B) {
  const NodeField d = div_e2n(B);
  const double V = B.grid().cell_volume();
  DivNorms n;
  for (double x : d.v) {
    n.L1 += std::abs(x) * V;
    n.L2 += x * x * V;
    n.Linf = std::max(n.Linf, std::abs(x));
  }
  n.L2 = std::sqrt(n.L2);
  return n;
}

// Recompute pressure and face velocity from the conserved cell variables and the edge field.
inline void sync_derived(State& s, double gamma) {
  s.p = pressure_from_conserved(s.rho, s.mom, s.rhoE, s.B_e, gamma);
  s.v_f = face_velocity(s.mom, s.rho);
}

struct StepOptions {
  double dt = 0.0;       // > 0 forces this step size (takes precedence over params)
  double dt_clip = 0.0;  // > 0 caps the step (output landing)
  double cg_tol = 0.0;   // > 0 overrides params.cg_tol
};

struct StepResult {
  State state;
  DiagnosticsRecord diag;
};

inline StepResult step(const State& s, const Params& pr, const StepOptions& opt = {}) {
  const Grid& g = s.g;
  const DtInfo info = compute_dt(s, pr);
  double dt = info.dt;
  if (pr.dt_fixed > 0.0) dt = pr.dt_fixed;
  if (opt.dt > 0.0) dt = opt.dt;
  if (opt.dt_clip > 0.0) dt = std::min(dt, opt.dt_clip);
  const double tol = opt.cg_tol > 0.0 ? opt.cg_tol : pr.cg_tol;
  const auto where = [&] { return " (step at t=" + std::to_string(s.t) + ", dt=" + std::to_string(dt) + ")"; };

  StepResult out;
  DiagnosticsRecord& d = out.diag;
  d.dt = dt;
  d.dt_ratio = info.dt_full > 0.0 ? dt / info.dt_full : 0.0;

  try {
    FluxTally tally_e;
    const Conserved Qs = explicit_step(s, dt, pr, &tally_e);

    const FaceField v_n = face_velocity(s.mom, s.rho);
    const StabCoeffs stab = stab_coeffs(v_n, pr.alpha);
    const FaceField mf_star = face_momentum(Qs.mom);
    const FaceField rho_f = face_density(Qs.rho);
    const double thp = pr.theta_p;

    EdgeField B_r = s.B_e;
    CellField p_r = s.p;
    Vec3Field m_r = Qs.mom;
    FaceField mom_f;
    Conserved Q_new;
    FluxTally tally_b, tally_p;
    EdgeField B_prev = s.B_e;
    for (int r = 0; r < pr.picard_R; ++r) {
      FaceField v_star = mf_star;
      if (r > 0) axpy(-dt, grad_c2f((1.0 - thp) * s.p + thp * p_r), v_star);
      v_star = divide(std::move(v_star), rho_f);
      const BStageResult bs = solve_alfven_sweep(s.B_e, B_r, v_n, v_star, Qs.rho, stab, pr, dt, tol);
      d.cg_iters_b += bs.stats.iterations;
      tally_b = {};
      const Conserved Qt = momentum_energy_reupdate(Qs, dt, bs.B_theta, bs.E_f, &tally_b);
      tally_p = {};
      const PStageResult ps =
          solve_pressure(Qt, s.p, s.mom, bs.B_new, p_r, r == 0 ? Qt.mom : m_r, pr, dt, tol, &tally_p);
      d.cg_iters_p += ps.cg_iters;
      const double dB = max_abs(bs.B_new - B_prev);
      if (r == 0) d.picard_dB1 = dB;
      if (r == 1) d.picard_dB2 = dB;
      B_prev = bs.B_new;
      B_r = bs.B_new;
      p_r = ps.p;
      m_r = ps.Q.mom;
      Q_new = ps.Q;
      mom_f = ps.mom_f;
    }

    State& n = out.state;
    n = State(g);
    n.rho = Q_new.rho;
    n.mom = Q_new.mom;
    n.rhoE = Q_new.E;
    n.B_e = B_r;
    n.p = pressure_from_conserved(n.rho, n.mom, n.rhoE, n.B_e, pr.gamma);
    n.v_f = divide(mom_f, rho_f);
    n.t = s.t + dt;
    const auto adm = check_admissible(n);
    if (!adm.ok) throw PositivityFailure("inadmissible state at " + adm.where);

    const Totals t0 = totals(s), t1 = totals(n);
    const double out_mass = tally_e.mass + tally_b.mass + tally_p.mass;
    const double out_E = tally_e.energy + tally_b.energy + tally_p.energy;
    d.cons_err_mass = std::abs(t1.mass - t0.mass + out_mass) / std::max(std::abs(t0.mass), 1e-300);
    d.cons_err_energy = std::abs(t1.energy - t0.energy + out_E) / std::max(std::abs(t0.energy), 1e-300);
    // momentum has no natural reference when the net momentum is zero; sqrt(M E) sets the scale
    const double mscale = std::max({std::abs(t0.mom[0]), std::abs(t0.mom[1]), std::abs(t0.mom[2]),
                                    std::sqrt(std::abs(t0.mass * t0.energy))});
    double dm = 0.0;
    for (int a = 0; a < 3; ++a)
      dm = std::max(dm, std::abs(t1.mom[a] - t0.mom[a] + tally_e.mom[a] + tally_b.mom[a] + tally_p.mom[a]));
    d.cons_err_mom = mscale > 0.0 ? dm / mscale : dm;
    d.t = n.t;
    d.mass = t1.mass;
    d.mom = t1.mom;
    d.energy = t1.energy;
    d.mag_energy = t1.mag_energy;
    const DivNorms dn = div_norms(n.B_e);
    d.divB_L1 = dn.L1;
    d.divB_L2 = dn.L2;
    d.divB_Linf = dn.Linf;
  } catch (const PositivityFailure& e) {
    throw PositivityFailure(std::string(e.what()) + where());
  } catch (const SolverFailure& e) {
    throw SolverFailure(std::string(e.what()) + where());
  }
  return out;
}

inline DiagnosticsRecord initial_diagnostics(const State& s, const Params& pr) {
  DiagnosticsRecord d;
  d.t = s.t;
  const Totals t = totals(s);
  d.mass = t.mass;
  d.mom = t.mom;
  d.energy = t.energy;
  d.mag_energy = t.mag_energy;
  const DivNorms dn = div_norms(s.B_e);
  d.divB_L1 = dn.L1;
  d.divB_L2 = dn.L2;
  d.divB_Linf = dn.Linf;
  const DtInfo info = compute_dt(s, pr);
  d.dt_ratio = info.dt_full > 0.0 ? info.dt / info.dt_full : 0.0;
  return d;
}

struct RunResult {
  State state;
  std::vector<DiagnosticsRecord> diag;
  bool ok = true;
  std::string error;
  int outputs = 0;
};

// Advances to t_end, landing exactly on every output time. on_output receives each output state
// (the initial one included) and, on failure, the last good state.
inline RunResult run(State s, const Params& pr, double t_end, const std::vector<double>& output_times,
                     const std::function<void(const State&, int)>& on_output = {},
                     const std::function<void(const DiagnosticsRecord&)>& on_step = {}, long max_steps = 10000000) {
  pr.validate();
  RunResult res;
  std::vector<double> outs;
  for (double t : output_times)
    if (t > s.t && t < t_end) outs.push_back(t);
  outs.push_back(t_end);
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
  if (on_output) on_output(s, res.outputs++);
  std::size_t next = 0;
  long n = 0;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  while (next < outs.size() && s.t < t_end - eps) {
    if (n >= max_steps) {
      res.ok = false;
      res.error = "step limit reached";
      break;
    }
    StepOptions opt;
    opt.dt_clip = outs[next] - s.t;
    try {
      StepResult sr = step(s, pr, opt);
      sr.diag.step = ++n;
      if (std::abs(sr.state.t - outs[next]) <= eps) sr.state.t = outs[next];
      s = std::move(sr.state);
      res.diag.push_back(sr.diag);
      if (on_step) on_step(sr.diag);
    } catch (const Error& e) {
      res.ok = false;
      res.error = e.what();
      if (on_output) on_output(s, res.outputs++);
      break;
    }
    while (next < outs.size() && s.t >= outs[next] - eps) {
      if (on_output) on_output(s, res.outputs++);
      ++next;
    }
  }
  res.state = std::move(s);
  return res;
}

// ---- linear stability of the one-step map ----

struct JacobianReport {
  int n_dof = 0;
  double spectral_radius = 0.0;
  double base_residual = 0.0;  // max |step(U) - U| at the base state
  bool equilibrium_warning = false;
  std::vector<double> matrix;  // row-major n_dof x n_dof, filled when requested
};

namespace detail {

// Degrees of freedom: rho, momentum (3), rhoE at cells, then B on the three edge sets.
inline std::vector<Field*> dof_fields(State& s) {
  return {&s.rho, &s.mom[0], &s.mom[1], &s.mom[2], &s.rhoE, &s.B_e[0], &s.B_e[1], &s.B_e[2]};
}

inline std::vector<double> pack(State& s) {
  std::vector<double> u;
  for (Field* f : dof_fields(s)) u.insert(u.end(), f->v.begin(), f->v.end());
  return u;
}

inline void unpack(State& s, const std::vector<double>& u, double gamma) {
  std::size_t o = 0;
  for (Field* f : dof_fields(s)) {
    std::copy(u.begin() + long(o), u.begin() + long(o + f->v.size()), f->v.begin());
    o += f->v.size();
  }
  sync_derived(s, gamma);
}

}  // namespace detail

struct JacobianOptions {
  double eps = 1e-7;
  int power_iterations = 200;
  unsigned seed = 12345;
  bool keep_matrix = false;
  double cg_tol = 1e-14;
};

// The Jacobian of one full step at fixed dt by central differences, plus a power-iteration
// estimate of its spectral radius. The random start has a solenoidal magnetic part.
inline JacobianReport jacobian_spectral(const State& eq, const Params& pr, double dt,
                                        const JacobianOptions& jo = {}) {
  State base = eq;
  StepOptions so;
  so.dt = dt;
  so.cg_tol = jo.cg_tol;
  auto map = [&](const std::vector<double>& u) {
    State w = base;
    detail::unpack(w, u, pr.gamma);
    State nw = step(w, pr, so).state;
    return detail::pack(nw);
  };
  const std::vector<double> u0 = detail::pack(base);
  const std::size_t n = u0.size();
  JacobianReport rep;
  rep.n_dof = int(n);
  {
    const std::vector<double> f0 = map(u0);
    double r = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r = std::max(r, std::abs(f0[i] - u0[i]));
      scale = std::max(scale, std::abs(u0[i]));
    }
    rep.base_residual = r;
    rep.equilibrium_warning = r > 10.0 * jo.eps * (1.0 + scale);
  }
  std::vector<double> J(n * n);
  std::vector<double> u = u0;
  for (std::size_t j = 0; j < n; ++j) {
    const double h = jo.eps * (1.0 + std::abs(u0[j]));
    u[j] = u0[j] + h;
    const std::vector<double> fp = map(u);
    u[j] = u0[j] - h;
    const std::vector<double> fm = map(u);
    u[j] = u0[j];
    for (std::size_t i = 0; i < n; ++i) J[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
  }

  // random start: cell parts uniform noise, magnetic part = curl of a random face potential
  std::mt19937 rng(jo.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  State probe = base;
  for (Field* f : {&probe.rho, &probe.mom[0], &probe.mom[1], &probe.mom[2], &probe.rhoE})
    for (double& x : f->v) x = U(rng);
  FaceField A = face_field(base.g);
  for (int a = 0; a < 3; ++a)
    for (double& x : A[a].v) x = U(rng);
  probe.B_e = curl_f2e(A);
  std::vector<double> x = detail::pack(probe);
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
  };
  double nx = norm(x);
  for (double& e : x) e /= nx;
  std::vector<double> y(n);
  std::vector<double> logs;
  for (int it = 0; it < jo.power_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &J[i * n];
      for (std::size_t k = 0; k < n; ++k) s += row[k] * x[k];
      y[i] = s;
    }
    const double ny = norm(y);
    logs.push_back(std::log(std::max(ny, 1e-300)));
    if (ny == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
  }
  // geometric mean of the growth factors over the last quarter smooths rotating dominant pairs
  const std::size_t m = std::max<std::size_t>(1, logs.size() / 4);
  double acc = 0.0;
  for (std::size_t i = logs.size() - m; i < logs.size(); ++i) acc += logs[i];
  rep.spectral_radius = std::exp(acc / double(m));
  if (jo.keep_matrix) rep.matrix = std::move(J);
  return rep;
}

}  // namespace vrmhd
