#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "errors.hpp"
#include "fields.hpp"
#include "ops.hpp"

namespace vrmhd {

// Cell-centred conserved variables (the magnetic field is carried separately on edges).
struct Conserved {
  CellField rho;
  Vec3Field mom;
  CellField E;
};

inline Conserved conserved_of(const State& s) { return {s.rho, s.mom, s.rhoE}; }

// Face fluxes; every FaceField holds the flux through x-, y- and z-faces in its three slots.
struct FluxSet {
  FaceField rho;
  std::array<FaceField, 3> mom;
  FaceField E;
};

inline FluxSet zero_fluxes(const Grid& g) {
  return {face_field(g), {face_field(g), face_field(g), face_field(g)}, face_field(g)};
}

// Net amount carried out of the domain through outflow boundaries, accumulated over stages.
struct FluxTally {
  double mass = 0.0;
  std::array<double, 3> mom{0.0, 0.0, 0.0};
  double energy = 0.0;
};

// Sum over boundary faces of (F at the closing slot - F at the first slot) times face area.
inline double boundary_net(const Field& F, int a) {
  const Grid& g = F.g;
  if (g.periodic(a)) return 0.0;
  const auto e = g.extents(F.loc);
  const double area = g.cell_volume() / g.d[a];
  double s = 0.0;
  for (int k = 0; k < e[2]; ++k)
    for (int j = 0; j < e[1]; ++j)
      for (int i = 0; i < e[0]; ++i) {
        const int c[3] = {i, j, k};
        if (c[a] == 0) s -= F.at(i, j, k);
        if (c[a] == e[a] - 1) s += F.at(i, j, k);
      }
  return s * area;
}

inline double boundary_net(const FaceField& F) {
  return boundary_net(F[0], 0) + boundary_net(F[1], 1) + boundary_net(F[2], 2);
}

// q -= dt * div F, recording what leaves through outflow faces.
inline void apply_flux(CellField& q, const FaceField& F, double dt, double* tally) {
  q -= dt * div_f2c(F);
  if (tally) *tally += dt * boundary_net(F);
}

inline void apply_fluxes(Conserved& Q, const FluxSet& F, double dt, FluxTally* tally) {
  apply_flux(Q.rho, F.rho, dt, tally ? &tally->mass : nullptr);
  for (int c = 0; c < 3; ++c) apply_flux(Q.mom[c], F.mom[c], dt, tally ? &tally->mom[c] : nullptr);
  apply_flux(Q.E, F.E, dt, tally ? &tally->energy : nullptr);
}

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Largest |eigenvalue| along `axis` for the chosen eigenvalue set.
inline double max_signal(const Prim& w, int axis, EigenSet set, double gamma) {
  if (!(w.rho > 0.0) || !(w.p >= 0.0)) throw InvalidState("max_signal: inadmissible state");
  const double u = std::abs(w.v[axis]);
  switch (set) {
    case EigenSet::V: return u;
    case EigenSet::VB: {
      const double b2 = w.B[0] * w.B[0] + w.B[1] * w.B[1] + w.B[2] * w.B[2];
      return u + std::sqrt(b2 / (kFourPi * w.rho));
    }
    case EigenSet::FULL: return u + wave_speeds(w.rho, w.p, w.B, gamma, axis).cf;
  }
  return u;
}

// Signal speed beyond the material velocity for the chosen set, at one cell.
inline double extra_speed(double rho, double p, const std::array<double, 3>& B, int axis, EigenSet set,
                          double gamma) {
  return max_signal({rho, {0, 0, 0}, p, B}, axis, set, gamma);
}

struct DtInfo {
  double dt = 0.0;
  double dt_full = 0.0;
  bool fallback = false;
};

namespace detail {

inline double cfl_denominator(const State& s, const Params& pr, EigenSet set, const Vec3Field& Bc) {
  const Grid& g = s.g;
  std::array<double, 3> lam{0.0, 0.0, 0.0};
  double lam_p = 0.0;
  const double kap = kappa(pr);
  for (std::size_t q = 0; q < s.rho.v.size(); ++q) {
    const double r = s.rho.v[q];
    const std::array<double, 3> B{Bc[0].v[q], Bc[1].v[q], Bc[2].v[q]};
    for (int a = 0; a < 3; ++a) {
      if (g.degenerate(a)) continue;
      const Prim w{r, {s.mom[0].v[q] / r, s.mom[1].v[q] / r, s.mom[2].v[q] / r}, s.p.v[q], B};
      lam[a] = std::max(lam[a], max_signal(w, a, set, pr.gamma));
    }
    lam_p = std::max(lam_p, 4.0 * pr.mu / (3.0 * r) + kap / (pr.cv * r));
  }
  double den = 0.0, inv2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (g.degenerate(a)) continue;
    den += lam[a] / g.d[a];
    inv2 += 1.0 / (g.d[a] * g.d[a]);
  }
  return den + 2.0 * lam_p * inv2;
}

}  // namespace detail

// CFL step for the configured eigenvalue set plus the FULL-set reference step.
inline DtInfo compute_dt(const State& s, const Params& pr) {
  const Vec3Field Bc = cell_B(s.B_e);
  const double den_full = detail::cfl_denominator(s, pr, EigenSet::FULL, Bc);
  DtInfo out;
  out.dt_full = den_full > 0.0 ? pr.cfl / den_full : 0.0;
  const double den =
      pr.eigen_set == EigenSet::FULL ? den_full : detail::cfl_denominator(s, pr, pr.eigen_set, Bc);
  if (den > 0.0) {
    out.dt = pr.cfl / den;
  } else {
    out.fallback = true;
    out.dt = pr.dt_max > 0.0 ? pr.dt_max : out.dt_full;
  }
  if (pr.dt_max > 0.0) out.dt = std::min(out.dt, pr.dt_max);
  if (!(out.dt > 0.0) || !std::isfinite(out.dt)) throw InvalidState("compute_dt: no admissible time step");
  return out;
}

// Convective flux of the split: (rho u_a, rho v u_a, rho k u_a). No pressure or magnetic terms.
struct ConvFlux {
  double rho;
  std::array<double, 3> mom;
  double E;
};

inline ConvFlux convective_flux(double rho, const std::array<double, 3>& v, int axis) {
  const double ua = v[axis];
  const double k = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {rho * ua, {rho * v[0] * ua, rho * v[1] * ua, rho * v[2] * ua}, rho * k * ua};
}

// Reconstruction variables W = (rho, vx, vy, vz, rho e) with rho e the internal energy density.
struct Recon {
  std::array<CellField, 5> W;                     // half-step evolved centres
  std::array<std::array<CellField, 5>, 3> slope;  // undivided slopes per axis
};

inline Recon reconstruct(const Conserved& Q, const CellField& mag, const Params& pr, double dt) {
  const Grid& g = Q.rho.g;
  Recon r;
  r.W[0] = Q.rho;
  for (int c = 0; c < 3; ++c) {
    r.W[1 + c] = Q.mom[c];
    for (std::size_t q = 0; q < Q.rho.v.size(); ++q) r.W[1 + c].v[q] /= Q.rho.v[q];
  }
  r.W[4] = Q.E - kinetic_energy_cell(Q.mom, Q.rho);
  r.W[4] -= mag;
  for (int a = 0; a < 3; ++a)
    for (int n = 0; n < 5; ++n) r.slope[a][n] = CellField(g, Loc::Cell);
  if (!pr.second_order) return r;

  const auto e = g.extents(Loc::Cell);
  for (int a = 0; a < 3; ++a) {
    if (g.degenerate(a)) continue;
    for (int n = 0; n < 5; ++n) {
      const CellField& w = r.W[n];
      CellField& s = r.slope[a][n];
      std::size_t q = 0;
      for (int k = 0; k < e[2]; ++k)
        for (int j = 0; j < e[1]; ++j)
          for (int i = 0; i < e[0]; ++i, ++q) {
            int lo[3] = {i, j, k}, hi[3] = {i, j, k};
            lo[a] -= 1;
            hi[a] += 1;
            const double bw = w.v[q] - w.get(lo[0], lo[1], lo[2]);
            const double fw = w.get(hi[0], hi[1], hi[2]) - w.v[q];
            s.v[q] = pr.limiter_on ? minmod(bw, fw) : 0.5 * (bw + fw);
          }
    }
  }
  // Half-step predictor of the pressureless convective system in primitive form.
  std::array<CellField, 5> Wh = r.W;
  for (std::size_t q = 0; q < Q.rho.v.size(); ++q) {
    const double rho = r.W[0].v[q];
    const double v[3] = {r.W[1].v[q], r.W[2].v[q], r.W[3].v[q]};
    double drho = 0.0, dv[3] = {0.0, 0.0, 0.0};
    for (int b = 0; b < 3; ++b) {
      if (g.degenerate(b)) continue;
      const double inv = 1.0 / g.d[b];
      drho += inv * (v[b] * r.slope[b][0].v[q] + rho * r.slope[b][1 + b].v[q]);
      for (int c = 0; c < 3; ++c) dv[c] += inv * v[b] * r.slope[b][1 + c].v[q];
    }
    Wh[0].v[q] -= 0.5 * dt * drho;
    for (int c = 0; c < 3; ++c) Wh[1 + c].v[q] -= 0.5 * dt * dv[c];
  }
  r.W = std::move(Wh);
  return r;
}

// Viscous and heat-conduction face fluxes (to be subtracted from the convective flux).
inline FluxSet viscous_fluxes(const Conserved& Q, const CellField& p, const Params& pr) {
  const Grid& g = Q.rho.g;
  FluxSet F = zero_fluxes(g);
  if (pr.mu == 0.0) return F;
  Vec3Field v = Q.mom;
  for (int c = 0; c < 3; ++c)
    for (std::size_t q = 0; q < v[c].v.size(); ++q) v[c].v[q] /= Q.rho.v[q];
  // G[c][b] = d v_c / d x_b at nodes
  std::array<std::array<Field, 3>, 3> G;
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < 3; ++b) G[c][b] = avg_to(diff(v[c], b), Loc::Node);
  const Field divv = G[0][0] + G[1][1] + G[2][2];
  CellField T(g, Loc::Cell);
  for (std::size_t q = 0; q < T.v.size(); ++q) T.v[q] = temperature(p.v[q], Q.rho.v[q], pr.cv, pr.gamma);
  const double kap = kappa(pr);
  for (int a = 0; a < 3; ++a) {
    const Loc fa = face_loc(a);
    Field work(g, fa);
    for (int c = 0; c < 3; ++c) {
      Field sig = G[c][a] + G[a][c];
      if (a == c) sig -= (2.0 / 3.0) * divv;
      sig *= pr.mu;
      const Field sf = avg_to(sig, fa);
      F.mom[c][a] = sf;
      work += hadamard(avg(v[c], a), sf);
    }
    F.E[a] = work + kap * diff(T, a);
  }
  return F;
}

// Rusanov fluxes of the convective subsystem with viscous terms subtracted.
inline FluxSet explicit_fluxes(const State& s, const Conserved& Q, const Params& pr, double dt) {
  const Grid& g = s.g;
  const Recon R = reconstruct(Q, magnetic_energy_cell(s.B_e), pr, dt);
  const Vec3Field Bc = cell_B(s.B_e);
  CellField extra[3];
  for (int a = 0; a < 3; ++a) {
    extra[a] = CellField(g, Loc::Cell);
    if (g.degenerate(a)) continue;
    for (std::size_t q = 0; q < extra[a].v.size(); ++q)
      extra[a].v[q] =
          extra_speed(Q.rho.v[q], s.p.v[q], {Bc[0].v[q], Bc[1].v[q], Bc[2].v[q]}, a, pr.eigen_set, pr.gamma);
  }
  FluxSet F = zero_fluxes(g);
  for (int a = 0; a < 3; ++a) {
    if (g.degenerate(a)) continue;
    const Loc fa = face_loc(a);
    const auto e = g.extents(fa);
    std::size_t q = 0;
    for (int k = 0; k < e[2]; ++k)
      for (int j = 0; j < e[1]; ++j)
        for (int i = 0; i < e[0]; ++i, ++q) {
          int cl[3] = {i, j, k}, cr[3] = {i, j, k};
          cl[a] -= 1;
          for (int b = 0; b < 3; ++b) {
            cl[b] = g.fix(Loc::Cell, b, cl[b]);
            cr[b] = g.fix(Loc::Cell, b, cr[b]);
          }
          const std::size_t L = g.index(Loc::Cell, cl[0], cl[1], cl[2]);
          const std::size_t Rr = g.index(Loc::Cell, cr[0], cr[1], cr[2]);
          double wl[5], wr[5];
          for (int n = 0; n < 5; ++n) {
            wl[n] = R.W[n].v[L] + 0.5 * R.slope[a][n].v[L];
            wr[n] = R.W[n].v[Rr] - 0.5 * R.slope[a][n].v[Rr];
          }
          const std::array<double, 3> vl{wl[1], wl[2], wl[3]}, vr{wr[1], wr[2], wr[3]};
          const ConvFlux fl = convective_flux(wl[0], vl, a), fr = convective_flux(wr[0], vr, a);
          const double ucl = Q.mom[a].v[L] / Q.rho.v[L], ucr = Q.mom[a].v[Rr] / Q.rho.v[Rr];
          const double smax = std::max({std::abs(vl[a]), std::abs(vr[a]), std::abs(ucl), std::abs(ucr)}) +
                              std::max(extra[a].v[L], extra[a].v[Rr]);
          const double kl = 0.5 * wl[0] * (vl[0] * vl[0] + vl[1] * vl[1] + vl[2] * vl[2]);
          const double kr = 0.5 * wr[0] * (vr[0] * vr[0] + vr[1] * vr[1] + vr[2] * vr[2]);
          F.rho[a].v[q] = 0.5 * (fl.rho + fr.rho) - 0.5 * smax * (wr[0] - wl[0]);
          for (int c = 0; c < 3; ++c)
            F.mom[c][a].v[q] =
                0.5 * (fl.mom[c] + fr.mom[c]) - 0.5 * smax * (wr[0] * vr[c] - wl[0] * vl[c]);
          F.E[a].v[q] = 0.5 * (fl.E + fr.E) - 0.5 * smax * ((wr[4] + kr) - (wl[4] + kl));
        }
  }
  if (pr.mu > 0.0) {
    const FluxSet V = viscous_fluxes(Q, s.p, pr);
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 3; ++c) F.mom[c][a] -= V.mom[c][a];
      F.E[a] -= V.E[a];
    }
  }
  return F;
}

// Q* = Q^n - dt div F for the convective-viscous subsystem.
inline Conserved explicit_step(const State& s, double dt, const Params& pr, FluxTally* tally = nullptr) {
  Conserved Q = conserved_of(s);
  const FluxSet F = explicit_fluxes(s, Q, pr, dt);
  apply_fluxes(Q, F, dt, tally);
  for (std::size_t q = 0; q < Q.rho.v.size(); ++q)
    if (!(Q.rho.v[q] > 0.0) || !std::isfinite(Q.rho.v[q]))
      throw PositivityFailure("explicit stage: non-positive density at cell " + std::to_string(q) +
                              " (t=" + std::to_string(s.t) + ")");
  return Q;
}

}  // namespace vrmhd
