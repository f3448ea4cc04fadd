#pragma once

#include <string>

#include "errors.hpp"
#include "explicit.hpp"
#include "fields.hpp"
#include "krylov.hpp"
#include "ops.hpp"
#include "precond.hpp"

namespace vrmhd {

struct PressureSystemCtx {
  FaceField h_f;  // face enthalpy, frozen for the sweep
  double dt = 0.0;
  double theta = 1.0;
  double gamma = 5.0 / 3.0;
};

// div(h_f grad p)
inline CellField weighted_laplacian(const FaceField& h_f, const CellField& p) {
  FaceField g = grad_c2f(p);
  for (int a = 0; a < 3; ++a) g[a] = hadamard(g[a], h_f[a]);
  return div_f2c(g);
}

// rho e(p) - theta^2 dt^2 div(h_f grad p); rho e(p) = p / (gamma - 1) for an ideal gas.
inline CellField apply_pressure(const PressureSystemCtx& c, const CellField& p) {
  CellField y = (1.0 / (c.gamma - 1.0)) * p;
  axpy(-c.theta * c.theta * c.dt * c.dt, weighted_laplacian(c.h_f, p), y);
  return y;
}

inline FaceField face_enthalpy(const CellField& p, const CellField& rho, double gamma) {
  CellField h(p.g, Loc::Cell);
  for (std::size_t q = 0; q < h.v.size(); ++q) {
    if (!(p.v[q] > 0.0)) throw PositivityFailure("pressure stage: non-positive pressure at cell " + std::to_string(q));
    h.v[q] = eos_enthalpy(p.v[q], rho.v[q], gamma);
  }
  return face_density(h);
}

inline FaceField face_momentum(const Vec3Field& mom) { return {{avg(mom[0], 0), avg(mom[1], 1), avg(mom[2], 2)}}; }

struct PStageResult {
  CellField p;      // solution of the last linear sweep
  Conserved Q;      // rho, momentum and total energy after the last sweep
  FaceField mom_f;  // face momentum after the last sweep
  int cg_iters = 0;
};

// S sweeps of the pressure subsystem. p_guess and mom_guess seed the frozen enthalpy and
// kinetic energy; the momentum/energy update is conservative (flux form).
inline PStageResult solve_pressure(const Conserved& Q_tilde, const CellField& p_n, const Vec3Field& mom_n,
                                   const EdgeField& B_next, const CellField& p_guess, const Vec3Field& mom_guess,
                                   const Params& pr, double dt, double cg_tol, FluxTally* tally = nullptr) {
  const double th = pr.theta_p;
  const CellField& rho = Q_tilde.rho;
  const FaceField mf_n = face_momentum(mom_n);
  const FaceField mf_t = face_momentum(Q_tilde.mom);
  const FaceField mf_mix = (1.0 - th) * mf_n + th * mf_t;
  const CellField mag = magnetic_energy_cell(B_next);

  PStageResult out;
  CellField p_it = p_guess;
  Vec3Field m_it = mom_guess;
  for (int s = 0; s < pr.picard_S; ++s) {
    PressureSystemCtx ctx{face_enthalpy(p_it, rho, pr.gamma), dt, th, pr.gamma};
    CellField b = Q_tilde.E - mag - kinetic_energy_cell(m_it, rho);
    {
      FaceField f = mf_mix;
      for (int a = 0; a < 3; ++a) f[a] = hadamard(f[a], ctx.h_f[a]);
      axpy(-dt, div_f2c(f), b);
    }
    if (th < 1.0) axpy(th * (1.0 - th) * dt * dt, weighted_laplacian(ctx.h_f, p_n), b);
    CellField r0 = b;
    r0 -= apply_pressure(ctx, p_it);
    const auto A = [&](const CellField& x) { return apply_pressure(ctx, x); };
    const double bn = std::sqrt(dot(b, b));
    auto res = pr.line_precond ? pcg_solve(A, LineBlockJacobi(A, r0, 1), r0, 0.0 * p_it, cg_tol, pr.cg_maxit, bn)
                               : cg_solve(A, r0, 0.0 * p_it, cg_tol, pr.cg_maxit, bn);
    out.cg_iters += res.stats.iterations;
    if (!res.stats.converged)
      throw SolverFailure("pressure solve: CG did not converge (residual " +
                          std::to_string(res.stats.final_residual) + " after " +
                          std::to_string(res.stats.iterations) + " iterations)");
    const CellField p_new = p_it + res.x;
    // gradient of p_theta assembled from the correction to avoid differencing a large background
    FaceField gp = grad_c2f((1.0 - th) * p_n + th * p_it);
    axpy(th, grad_c2f(res.x), gp);
    const CellField p_theta = (1.0 - th) * p_n + th * p_new;
    const bool last = s + 1 == pr.picard_S;
    FluxTally* t = last ? tally : nullptr;

    out.mom_f = mf_t;
    axpy(-dt, gp, out.mom_f);
    out.Q = Q_tilde;
    for (int a = 0; a < 3; ++a) {
      FaceField pf = face_field(rho.g);
      pf[a] = avg(p_theta, a);
      apply_flux(out.Q.mom[a], pf, dt, t ? &t->mom[a] : nullptr);
    }
    FaceField ef = (1.0 - th) * mf_n + th * out.mom_f;
    for (int a = 0; a < 3; ++a) ef[a] = hadamard(ef[a], ctx.h_f[a]);
    apply_flux(out.Q.E, ef, dt, t ? &t->energy : nullptr);

    for (double x : p_new.v)
      if (!(x > 0.0) || !std::isfinite(x)) throw PositivityFailure("pressure stage: non-positive pressure");
    out.p = p_new;
    p_it = p_new;
    m_it = out.Q.mom;
  }
  return out;
}

}  // namespace vrmhd
