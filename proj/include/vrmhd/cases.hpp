#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "driver.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "grid.hpp"
#include "ops.hpp"

namespace vrmhd {

struct CaseSpec {
  std::string name;
  int dims = 1;
  Grid grid;
  Params params;
  double t_end = 0.0;
  std::vector<double> output_times;
  bool has_reference = false;
  std::map<std::string, double> knobs;
};

struct CaseInit {
  State state;
  CaseSpec spec;
};

// Overrides applied before sampling: grid resolution, parameters (gamma enters the energy), and
// case-specific knobs (amplitude, p0, radius, bx, ...).
struct CaseOptions {
  std::optional<std::array<int, 3>> n;
  std::optional<std::array<std::array<double, 2>, 3>> extents;
  std::optional<Params> params;
  std::map<std::string, double> knobs;
};

inline const std::vector<std::string>& case_catalog() {
  static const std::vector<std::string> names{
      "current_sheet", "rp1",           "rp2",   "rp3",           "rp4",           "alfven_wave",
      "isodensity_vortex", "orszag_tang", "orszag_tang_vr", "blast_wave", "rotor", "rotor_lowbeta",
      "blast_wave_3d", "orszag_tang_vr_3d"};
  return names;
}

using Vec3 = std::array<double, 3>;
using PrimFn = std::function<Prim(double, double, double)>;  // rho, v, p (B ignored)
using BFn = std::function<Vec3(double, double, double)>;     // pointwise magnetic field

namespace detail {

inline const std::array<Boundary, 3> kPeriodic{Boundary::Periodic, Boundary::Periodic, Boundary::Periodic};
inline const std::array<Boundary, 3> kOutflowX{Boundary::Outflow, Boundary::Periodic, Boundary::Periodic};

inline double knob(const std::map<std::string, double>& k, const std::string& key, double def) {
  const auto it = k.find(key);
  return it == k.end() ? def : it->second;
}

// Cell scalars at centres, face velocity at face centres, B either pointwise on edges or as the
// discrete curl of a face-sampled vector potential.
inline State sample_state(const Grid& g, const Params& pr, const PrimFn& prim, const BFn& Bpoint,
                          const BFn& Apot = {}) {
  State s(g);
  const auto e = g.extents(Loc::Cell);
  std::size_t q = 0;
  for (int k = 0; k < e[2]; ++k)
    for (int j = 0; j < e[1]; ++j)
      for (int i = 0; i < e[0]; ++i, ++q) {
        const Prim w = prim(g.coord(Loc::Cell, 0, i), g.coord(Loc::Cell, 1, j), g.coord(Loc::Cell, 2, k));
        s.rho.v[q] = w.rho;
        for (int a = 0; a < 3; ++a) s.mom[a].v[q] = w.rho * w.v[a];
        s.p.v[q] = w.p;
      }
  for (int a = 0; a < 3; ++a)
    s.v_f[a].fill([&](double x, double y, double z) { return prim(x, y, z).v[a]; });
  if (Apot) {
    FaceField A = face_field(g);
    for (int a = 0; a < 3; ++a) A[a].fill([&](double x, double y, double z) { return Apot(x, y, z)[a]; });
    s.B_e = curl_f2e(A);
  } else {
    for (int a = 0; a < 3; ++a) s.B_e[a].fill([&](double x, double y, double z) { return Bpoint(x, y, z)[a]; });
  }
  s.rhoE = total_energy(s.rho, s.mom, s.p, s.B_e, pr.gamma);
  return s;
}

struct RPData {
  Prim L, R;
  double xd, t_end, theta_b;
};

inline RPData rp_data(const std::string& name) {
  const double s = std::sqrt(kFourPi);
  if (name == "rp1")
    return {{1.0, {0, 0, 0}, 1.0, {0.75 * s, s, 0}}, {0.125, {0, 0, 0}, 0.1, {0.75 * s, -s, 0}}, 0.0, 0.1, 0.55};
  if (name == "rp2")
    return {{1.08, {1.2, 0.01, 0.5}, 0.95, {2.0, 3.6, 2.0}},
            {0.9891, {-0.0131, 0.0269, 0.010037}, 0.97159, {2.0, 4.0244, 2.0026}},
            -0.1,
            0.2,
            0.55};
  if (name == "rp3")
    return {{1.7, {0, 0, 0}, 1.7, {3.899398, 3.544908, 0}},
            {0.2, {0, 0, -1.496891}, 0.2, {3.899398, 2.785898, 2.192064}},
            -0.1,
            0.15,
            0.55};
  return {{1.0, {0, 0, 0}, 1.0, {1.3 * s, s, 0}}, {0.4, {0, 0, 0}, 0.4, {1.3 * s, -s, 0}}, 0.0, 0.16, 0.65};
}

inline Grid grid_for(const CaseOptions& o, std::array<int, 3> def, std::array<std::array<double, 2>, 3> ext,
                     std::array<Boundary, 3> bc) {
  return make_grid(o.n ? *o.n : def, o.extents ? *o.extents : ext, bc);
}

inline std::vector<double> evenly(double t_end, int k) {
  std::vector<double> v;
  for (int i = 1; i <= k; ++i) v.push_back(t_end * i / k);
  return v;
}

// Alfven wave along n = (1,2,0)/sqrt(5) with unit Alfven speed.
inline Prim alfven_point(double x, double y, double t, double amp) {
  const double nx = 1.0 / std::sqrt(5.0), ny = 2.0 / std::sqrt(5.0);
  const double phi = 2.0 * kPi / ny * (nx * (x - nx * t) + ny * (y - ny * t));
  const double b = std::sqrt(kFourPi);
  return {1.0,
          {-amp * ny * std::cos(phi), amp * nx * std::cos(phi), amp * std::sin(phi)},
          100.0,
          {b * (nx + ny * amp * std::cos(phi)), b * (ny - nx * amp * std::cos(phi)), -b * amp * std::sin(phi)}};
}

inline Prim vortex_point(double x, double y, double v0, double A0) {
  const double r2 = x * x + y * y;
  const double ev = std::exp(0.5 * (1.0 - r2));
  const double cv = v0 / (2.0 * kPi), cb = A0 / (2.0 * kPi);
  const double dp = cb * cb * (1.0 - r2) * ev * ev / kEightPi - 0.5 * cv * cv * ev * ev;
  return {1.0, {-cv * ev * y, cv * ev * x, 0.0}, 1.0 + dp, {-cb * ev * y, cb * ev * x, 0.0}};
}

inline double current_sheet_by(double x, double t, double B0, double eta) {
  if (t <= 0.0) return x <= 1e-12 ? B0 : -B0;
  return -B0 * std::erf(0.5 * x / std::sqrt(eta * t));
}

}  // namespace detail

inline CaseInit init_case(const std::string& name, const CaseOptions& o = {}) {
  using namespace detail;
  CaseInit ci;
  CaseSpec& c = ci.spec;
  c.name = name;
  c.knobs = o.knobs;
  Params pr;
  PrimFn prim;
  BFn Bp, Apot;
  const double s4 = std::sqrt(kFourPi);
  auto K = [&](const std::string& k, double d) {
    const double v = knob(o.knobs, k, d);
    c.knobs[k] = v;
    return v;
  };

  if (name == "current_sheet") {
    const double p0 = K("p0", 1e5), Bz = K("bz", 1e4), B0 = K("by0", 1e-3);
    pr.eta = 0.1;
    pr.mu = 0.0;
    pr.Pr = 1.0;
    pr.cv = 1.0;
    pr.theta_b = 1.0;
    pr.theta_p = 1.0;
    pr.dt_fixed = 10.0;
    pr.line_precond = true;
    c.grid = grid_for(o, {5000, 1, 1}, {{{-50, 50}, {0, 1}, {0, 1}}}, kOutflowX);
    c.t_end = 1000.0;
    c.output_times = evenly(c.t_end, 4);
    c.has_reference = true;
    prim = [p0](double, double, double) { return Prim{1.0, {0, 0, 0}, p0, {0, 0, 0}}; };
    Bp = [=](double x, double, double) {
      return Vec3{0.0, current_sheet_by(x, 0.0, B0, 0.1), Bz};
    };
  } else if (name == "rp1" || name == "rp2" || name == "rp3" || name == "rp4") {
    const RPData d = rp_data(name);
    pr.theta_b = d.theta_b;
    pr.theta_p = 1.0;
    pr.cfl = 0.9;
    pr.second_order = true;
    pr.limiter_on = true;
    c.grid = grid_for(o, {400, 1, 1}, {{{-0.5, 0.5}, {0, 1}, {0, 1}}}, kOutflowX);
    c.t_end = d.t_end;
    c.output_times = {d.t_end};
    prim = [d](double x, double, double) { return x < d.xd ? d.L : d.R; };
    Bp = [d](double x, double, double) {
      if (std::abs(x - d.xd) < 1e-12) {
        Vec3 m;
        for (int a = 0; a < 3; ++a) m[a] = 0.5 * (d.L.B[a] + d.R.B[a]);
        return m;
      }
      return x < d.xd ? d.L.B : d.R.B;
    };
  } else if (name == "alfven_wave") {
    const double amp = K("amplitude", 0.1);
    pr.theta_b = 0.5;
    pr.theta_p = 0.5;
    pr.cfl = 0.75;
    pr.alpha = 0.0;
    pr.second_order = true;
    pr.limiter_on = false;
    pr.eigen_set = EigenSet::VB;
    c.grid = grid_for(o, {20, 20, 1}, {{{0, 2}, {0, 1}, {0, 1}}}, kPeriodic);
    c.t_end = 2.0 / std::sqrt(5.0);
    c.output_times = {c.t_end};
    c.has_reference = true;
    prim = [amp](double x, double y, double) { return alfven_point(x, y, 0.0, amp); };
    Bp = [amp](double x, double y, double) { return alfven_point(x, y, 0.0, amp).B; };
  } else if (name == "isodensity_vortex") {
    const double v0 = K("v0", 1.0), A0 = K("a0", s4);
    pr.theta_b = 0.5;
    pr.theta_p = 0.5;
    pr.cfl = 1.0;
    pr.alpha = 0.0;
    pr.eigen_set = EigenSet::VB;
    pr.second_order = true;
    pr.limiter_on = true;
    c.grid = grid_for(o, {100, 100, 1}, {{{-10, 10}, {-10, 10}, {0, 1}}}, kPeriodic);
    c.t_end = 50.0;
    c.output_times = evenly(c.t_end, 5);
    c.has_reference = true;
    prim = [=](double x, double y, double) { return vortex_point(x, y, v0, A0); };
    Apot = [=](double x, double y, double) {
      return Vec3{0.0, 0.0, A0 / (2.0 * kPi) * std::exp(0.5 * (1.0 - x * x - y * y))};
    };
  } else if (name == "orszag_tang" || name == "orszag_tang_vr") {
    const bool vr = name == "orszag_tang_vr";
    const double G = pr.gamma;
    if (vr) {
      pr.mu = 1e-2;
      pr.eta = 1e-2;
      pr.Pr = 1.0;
      pr.cv = 1.0;
      pr.theta_b = 0.6;
      pr.theta_p = 0.6;
    } else {
      pr.theta_b = 0.65;
      pr.theta_p = 1.0;
    }
    pr.cfl = 0.9;
    pr.second_order = true;
    pr.limiter_on = true;
    c.grid = grid_for(o, {100, 100, 1}, {{{0, 2 * kPi}, {0, 2 * kPi}, {0, 1}}}, kPeriodic);
    c.t_end = K("t_end", 0.5);
    c.output_times = evenly(c.t_end, 2);
    if (vr)
      prim = [s4](double x, double y, double) {
        const double p = 3.75 + 0.25 * std::cos(4 * x) + 0.8 * std::cos(2 * x) * std::cos(y) -
                         std::cos(x) * std::cos(y) + 0.25 * std::cos(2 * y);
        return Prim{1.0, {-s4 * std::sin(y), s4 * std::sin(x), 0.0}, p, {0, 0, 0}};
      };
    else
      prim = [G](double x, double y, double) {
        return Prim{G * G, {-std::sin(y), std::sin(x), 0.0}, G, {0, 0, 0}};
      };
    Bp = [s4](double x, double y, double) { return Vec3{-s4 * std::sin(y), s4 * std::sin(2 * x), 0.0}; };
  } else if (name == "blast_wave" || name == "blast_wave_3d") {
    const bool d3 = name == "blast_wave_3d";
    const double Bx = K("bx", 100.0), R = K("radius", 0.1), rho0 = K("rho0", 1.0);
    pr.theta_b = d3 ? 0.55 : 0.6;
    pr.theta_p = d3 ? 1.0 : 0.6;
    pr.cfl = 0.9;
    pr.eigen_set = EigenSet::VB;
    pr.second_order = true;
    pr.limiter_on = true;
    c.grid = d3 ? grid_for(o, {32, 32, 32}, {{{-0.55, 0.55}, {-0.55, 0.55}, {-0.55, 0.55}}}, kPeriodic)
                : grid_for(o, {100, 100, 1}, {{{-0.55, 0.55}, {-0.55, 0.55}, {0, 1}}}, kPeriodic);
    c.t_end = K("t_end", 0.01);
    c.output_times = evenly(c.t_end, 2);
    prim = [=](double x, double y, double z) {
      const double r = std::sqrt(x * x + y * y + (d3 ? z * z : 0.0));
      return Prim{rho0, {0, 0, 0}, r < R ? 1e3 : 0.1, {0, 0, 0}};
    };
    Bp = [Bx](double, double, double) { return Vec3{Bx, 0.0, 0.0}; };
  } else if (name == "rotor" || name == "rotor_lowbeta") {
    const double Bx = K("bx", name == "rotor" ? 2.5 : 25.0), R = K("radius", 0.1), w = K("omega", 10.0);
    pr.theta_b = 0.5;
    pr.theta_p = 1.0;
    pr.cfl = 0.9;
    pr.second_order = true;
    pr.limiter_on = true;
    c.grid = grid_for(o, {100, 100, 1}, {{{-0.5, 0.5}, {-0.5, 0.5}, {0, 1}}}, kPeriodic);
    c.t_end = K("t_end", 0.25);
    c.output_times = evenly(c.t_end, 2);
    prim = [=](double x, double y, double) {
      const double r = std::sqrt(x * x + y * y), R1 = 1.05 * R;
      const double f = r < R ? 1.0 : (r < R1 ? (R1 - r) / (R1 - R) : 0.0);
      return Prim{1.0 + 9.0 * f, {-w * y * f, w * x * f, 0.0}, 1.0, {0, 0, 0}};
    };
    Bp = [Bx](double, double, double) { return Vec3{Bx, 0.0, 0.0}; };
  } else if (name == "orszag_tang_vr_3d") {
    pr.mu = 1e-6;
    pr.eta = 1e-3;
    pr.cv = 1.0;
    pr.Pr = 0.72;
    pr.theta_b = 0.65;
    pr.theta_p = 0.65;
    pr.cfl = 0.9;
    pr.second_order = true;
    pr.limiter_on = true;
    c.grid = grid_for(o, {32, 32, 32}, {{{0, 1}, {0, 1}, {0, 1}}}, kPeriodic);
    c.t_end = K("t_end", 0.1);
    c.output_times = evenly(c.t_end, 2);
    const double tp = 2 * kPi;
    prim = [tp](double x, double y, double z) {
      return Prim{25.0 / (36.0 * kPi), {-std::sin(tp * z), std::sin(tp * x), std::sin(tp * y)}, 5.0 / (12.0 * kPi),
                  {0, 0, 0}};
    };
    Bp = [tp](double x, double y, double z) {
      return Vec3{-std::sin(tp * z), std::sin(2 * tp * x), std::sin(2 * tp * y)};
    };
  } else if (name == "stability_equilibrium") {
    // uniform tilted flow and field; used for the linear stability analysis
    const double a1 = kPi / 6, a2 = kPi / 4, a3 = kPi / 3;
    pr.theta_b = 1.0;
    pr.theta_p = 1.0;
    pr.cfl = 0.9;
    pr.eigen_set = EigenSet::VB;
    c.grid = grid_for(o, {20, 20, 1}, {{{-0.5, 0.5}, {-0.5, 0.5}, {0, 1}}}, kPeriodic);
    c.t_end = 0.1;
    c.output_times = {c.t_end};
    const double G = pr.gamma;
    prim = [=](double, double, double) {
      return Prim{1.0, {std::cos(a1) * std::cos(a2), std::sin(a1) * std::cos(a2), std::sin(a2)}, 1.0 / G, {0, 0, 0}};
    };
    Bp = [=](double, double, double) {
      return Vec3{s4 * std::cos(a3) * std::cos(a2), s4 * std::sin(a3) * std::cos(a2), s4 * std::sin(a2)};
    };
  } else {
    std::string list;
    for (const auto& n : case_catalog()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown case '" + name + "'; available: " + list);
  }

  if (o.params) {
    pr = *o.params;
  }
  pr.validate();
  c.params = pr;
  c.dims = c.grid.dims();
  ci.state = sample_state(c.grid, pr, prim, Bp, Apot);
  return ci;
}

// Analytic solution at a point, where one exists: current sheet (erf profile), Alfven wave
// (advected initial data) and the stationary vortex (initial data).
inline std::optional<Prim> reference(const std::string& name, const Vec3& x, double t,
                                     const std::map<std::string, double>& knobs = {}) {
  using namespace detail;
  if (name == "current_sheet") {
    const double p0 = knob(knobs, "p0", 1e5), Bz = knob(knobs, "bz", 1e4), B0 = knob(knobs, "by0", 1e-3);
    const double eta = knob(knobs, "eta", 0.1);
    return Prim{1.0, {0, 0, 0}, p0, {0.0, current_sheet_by(x[0], t, B0, eta), Bz}};
  }
  if (name == "alfven_wave") return alfven_point(x[0], x[1], t, knob(knobs, "amplitude", 0.1));
  if (name == "isodensity_vortex")
    return vortex_point(x[0], x[1], knob(knobs, "v0", 1.0), knob(knobs, "a0", std::sqrt(kFourPi)));
  return std::nullopt;
}

}  // namespace vrmhd
