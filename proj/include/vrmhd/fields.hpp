#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "grid.hpp"

namespace vrmhd {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;
inline constexpr double kEightPi = 8.0 * std::numbers::pi;

// Three scalar fields; for faces/edges component a lives at Face_a / Edge_a.
struct Vec3Field {
  std::array<Field, 3> c;
  Field& operator[](int a) { return c[a]; }
  const Field& operator[](int a) const { return c[a]; }
  const Grid& grid() const { return c[0].g; }

  Vec3Field& operator+=(const Vec3Field& o) {
    for (int a = 0; a < 3; ++a) c[a] += o.c[a];
    return *this;
  }
  Vec3Field& operator-=(const Vec3Field& o) {
    for (int a = 0; a < 3; ++a) c[a] -= o.c[a];
    return *this;
  }
  Vec3Field& operator*=(double s) {
    for (auto& f : c) f *= s;
    return *this;
  }
};

inline Vec3Field operator+(Vec3Field a, const Vec3Field& b) { return a += b; }
inline Vec3Field operator-(Vec3Field a, const Vec3Field& b) { return a -= b; }
inline Vec3Field operator*(double s, Vec3Field a) { return a *= s; }

inline Vec3Field cell_vec(const Grid& g, double x = 0, double y = 0, double z = 0) {
  return {{Field(g, Loc::Cell, x), Field(g, Loc::Cell, y), Field(g, Loc::Cell, z)}};
}
inline Vec3Field face_field(const Grid& g, double x = 0, double y = 0, double z = 0) {
  return {{Field(g, Loc::FaceX, x), Field(g, Loc::FaceY, y), Field(g, Loc::FaceZ, z)}};
}
inline Vec3Field edge_field(const Grid& g, double x = 0, double y = 0, double z = 0) {
  return {{Field(g, Loc::EdgeX, x), Field(g, Loc::EdgeY, y), Field(g, Loc::EdgeZ, z)}};
}

using CellField = Field;
using NodeField = Field;
using FaceField = Vec3Field;
using EdgeField = Vec3Field;

inline double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t q = 0; q < a.v.size(); ++q) s += a.v[q] * b.v[q];
  return s;
}
inline double dot(const Vec3Field& a, const Vec3Field& b) {
  return dot(a.c[0], b.c[0]) + dot(a.c[1], b.c[1]) + dot(a.c[2], b.c[2]);
}
inline void axpy(double s, const Field& x, Field& y) {
  for (std::size_t q = 0; q < y.v.size(); ++q) y.v[q] += s * x.v[q];
}
inline void axpy(double s, const Vec3Field& x, Vec3Field& y) {
  for (int a = 0; a < 3; ++a) axpy(s, x.c[a], y.c[a]);
}
inline double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}
inline double max_abs(const Vec3Field& f) {
  return std::max({max_abs(f.c[0]), max_abs(f.c[1]), max_abs(f.c[2])});
}
inline bool all_finite(const Field& f) {
  return std::all_of(f.v.begin(), f.v.end(), [](double x) { return std::isfinite(x); });
}

enum class EigenSet { V, VB, FULL };

inline const char* eigen_set_name(EigenSet s) {
  switch (s) {
    case EigenSet::V: return "V";
    case EigenSet::VB: return "VB";
    case EigenSet::FULL: return "FULL";
  }
  return "?";
}

struct Params {
  double gamma = 5.0 / 3.0;
  double mu = 0.0;
  double eta = 0.0;
  double Pr = 1.0;
  double cv = 1.0;
  double cfl = 0.9;
  double theta_b = 1.0;
  double theta_p = 1.0;
  double alpha = 1.0;
  int picard_R = 2;
  int picard_S = 2;
  double cg_tol = 1e-10;
  int cg_maxit = 1000;
  EigenSet eigen_set = EigenSet::V;
  bool limiter_on = true;
  bool second_order = false;
  bool line_precond = false;  // line block-Jacobi preconditioning of both implicit solves
  double dt_fixed = 0.0;  // > 0 forces the step size
  double dt_max = 0.0;    // > 0 caps the step size; also the fallback for a zero CFL denominator

  void validate() const {
    auto bad = [](const std::string& m) { throw InvalidParams(m); };
    if (!(gamma > 1.0)) bad("gamma must exceed 1");
    if (!(mu >= 0.0)) bad("mu must be non-negative");
    if (!(eta >= 0.0)) bad("eta must be non-negative");
    if (!(cv > 0.0)) bad("cv must be positive");
    if (!(cfl > 0.0 && cfl <= 1.0)) bad("cfl must lie in (0,1]");
    if (!(theta_b >= 0.5 && theta_b <= 1.0)) bad("theta_b must lie in [1/2,1]");
    if (!(theta_p >= 0.5 && theta_p <= 1.0)) bad("theta_p must lie in [1/2,1]");
    if (!(alpha >= 0.0)) bad("alpha must be non-negative");
    if (picard_R < 1 || picard_S < 1) bad("picard_R and picard_S must be at least 1");
    if (!(cg_tol > 0.0)) bad("cg_tol must be positive");
    if (cg_maxit < 1) bad("cg_maxit must be positive");
    if (mu > 0.0 && !(Pr > 0.0)) bad("Pr must be positive when mu > 0");
    if (dt_fixed < 0.0 || dt_max < 0.0) bad("dt_fixed and dt_max must be non-negative");
  }
};

// ---- ideal-gas equation of state ----

inline double eos_internal_energy(double p, double rho, double gamma) {
  if (!(rho > 0.0)) throw InvalidState("eos_internal_energy: non-positive density");
  return p / ((gamma - 1.0) * rho);
}
inline double eos_pressure(double e, double rho, double gamma) {
  if (!(rho > 0.0)) throw InvalidState("eos_pressure: non-positive density");
  return (gamma - 1.0) * rho * e;
}
inline double eos_enthalpy(double p, double rho, double gamma) {
  if (!(rho > 0.0)) throw InvalidState("eos_enthalpy: non-positive density");
  return gamma * p / ((gamma - 1.0) * rho);
}
inline double temperature(double p, double rho, double cv, double gamma) {
  if (!(rho > 0.0)) throw InvalidState("temperature: non-positive density");
  return p / (rho * (gamma - 1.0) * cv);
}
// kappa = c_p mu / Pr
inline double kappa(const Params& pr) {
  if (pr.mu == 0.0) return 0.0;
  if (!(pr.Pr > 0.0)) throw InvalidParams("kappa: Pr must be positive when mu > 0");
  return pr.gamma * pr.cv * pr.mu / pr.Pr;
}

struct WaveSpeeds {
  double c, ca, cs, cf;
};

inline WaveSpeeds wave_speeds(double rho, double p, const std::array<double, 3>& B, double gamma, int axis) {
  if (!(rho > 0.0) || !(p >= 0.0)) throw InvalidState("wave_speeds: inadmissible state");
  const double c2 = gamma * p / rho;
  const double b2 = (B[0] * B[0] + B[1] * B[1] + B[2] * B[2]) / (kFourPi * rho);
  const double ca = B[axis] / std::sqrt(kFourPi * rho);
  const double s = b2 + c2;
  double rad = s * s - 4.0 * ca * ca * c2;
  if (std::abs(rad) < 1e-14 * s * s || rad < 0.0) rad = 0.0;
  const double r = std::sqrt(rad);
  const double cs = std::sqrt(std::max(0.0, 0.5 * (s - r)));
  const double cf = std::sqrt(0.5 * (s + r));
  return {std::sqrt(c2), ca, cs, cf};
}

// ---- primitive/conserved conversion (pointwise) ----

struct Prim {
  double rho;
  std::array<double, 3> v;
  double p;
  std::array<double, 3> B;
};

struct Cons {
  double rho;
  std::array<double, 3> m;
  double E;
  std::array<double, 3> B;
};

inline Cons prim_to_cons(const Prim& w, double gamma) {
  const double v2 = w.v[0] * w.v[0] + w.v[1] * w.v[1] + w.v[2] * w.v[2];
  const double b2 = w.B[0] * w.B[0] + w.B[1] * w.B[1] + w.B[2] * w.B[2];
  return {w.rho,
          {w.rho * w.v[0], w.rho * w.v[1], w.rho * w.v[2]},
          w.p / (gamma - 1.0) + 0.5 * w.rho * v2 + b2 / kEightPi,
          w.B};
}

inline Prim cons_to_prim(const Cons& q, double gamma) {
  if (!(q.rho > 0.0)) throw InvalidState("cons_to_prim: non-positive density");
  const std::array<double, 3> v{q.m[0] / q.rho, q.m[1] / q.rho, q.m[2] / q.rho};
  const double k = 0.5 * (q.m[0] * v[0] + q.m[1] * v[1] + q.m[2] * v[2]);
  const double b2 = q.B[0] * q.B[0] + q.B[1] * q.B[1] + q.B[2] * q.B[2];
  return {q.rho, v, (gamma - 1.0) * (q.E - k - b2 / kEightPi), q.B};
}

// ---- solver state ----

struct State {
  Grid g;
  CellField rho;
  Vec3Field mom;  // cell-centred momentum
  CellField rhoE;
  FaceField v_f;
  EdgeField B_e;
  CellField p;
  double t = 0.0;

  State() = default;
  explicit State(const Grid& grid)
      : g(grid),
        rho(grid, Loc::Cell),
        mom(cell_vec(grid)),
        rhoE(grid, Loc::Cell),
        v_f(face_field(grid)),
        B_e(edge_field(grid)),
        p(grid, Loc::Cell) {}
};

// m = (<Bx^2> + <By^2> + <Bz^2>)/(8 pi), squares taken on edges then averaged to cells.
inline CellField magnetic_energy_cell(const EdgeField& B) {
  CellField m(B.grid(), Loc::Cell);
  for (int a = 0; a < 3; ++a) m += avg_to(hadamard(B[a], B[a]), Loc::Cell);
  return (1.0 / kEightPi) * m;
}

inline CellField kinetic_energy_cell(const Vec3Field& mom, const CellField& rho) {
  CellField k(rho.g, Loc::Cell);
  for (std::size_t q = 0; q < k.v.size(); ++q) {
    if (!(rho.v[q] > 0.0)) throw InvalidState("kinetic_energy_cell: non-positive density");
    const double m2 = mom[0].v[q] * mom[0].v[q] + mom[1].v[q] * mom[1].v[q] + mom[2].v[q] * mom[2].v[q];
    k.v[q] = 0.5 * m2 / rho.v[q];
  }
  return k;
}

// Cell average of the edge field (each component averaged over its four edges).
inline Vec3Field cell_B(const EdgeField& B) {
  return {{avg_to(B[0], Loc::Cell), avg_to(B[1], Loc::Cell), avg_to(B[2], Loc::Cell)}};
}

// Pressure implied by the conserved variables and the edge magnetic field.
inline CellField pressure_from_conserved(const CellField& rho, const Vec3Field& mom, const CellField& rhoE,
                                         const EdgeField& B, double gamma) {
  CellField p = rhoE;
  p -= kinetic_energy_cell(mom, rho);
  p -= magnetic_energy_cell(B);
  p *= (gamma - 1.0);
  return p;
}

inline CellField total_energy(const CellField& rho, const Vec3Field& mom, const CellField& p,
                              const EdgeField& B, double gamma) {
  CellField e = (1.0 / (gamma - 1.0)) * p;
  e += kinetic_energy_cell(mom, rho);
  e += magnetic_energy_cell(B);
  return e;
}

// Face velocity from cell momentum and density, both averaged to the face.
inline FaceField face_velocity(const Vec3Field& mom, const CellField& rho) {
  FaceField v = face_field(rho.g);
  for (int a = 0; a < 3; ++a) {
    const Field ma = avg(mom[a], a);
    const Field ra = avg(rho, a);
    for (std::size_t q = 0; q < v[a].v.size(); ++q) v[a].v[q] = ma.v[q] / ra.v[q];
  }
  return v;
}

struct AdmissibilityReport {
  bool ok = true;
  std::string where;
};

inline AdmissibilityReport check_admissible(const State& s) {
  const auto e = s.g.extents(Loc::Cell);
  for (int k = 0; k < e[2]; ++k)
    for (int j = 0; j < e[1]; ++j)
      for (int i = 0; i < e[0]; ++i) {
        const double r = s.rho.at(i, j, k), p = s.p.at(i, j, k);
        if (!(r > 0.0) || !(p > 0.0) || !std::isfinite(r) || !std::isfinite(p)) {
          return {false, "cell (" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) +
                             ") rho=" + std::to_string(r) + " p=" + std::to_string(p)};
        }
      }
  return {};
}

}  // namespace vrmhd
