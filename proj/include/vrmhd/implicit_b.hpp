#pragma once

#include <string>

#include "errors.hpp"
#include "explicit.hpp"
#include "fields.hpp"
#include "krylov.hpp"
#include "ops.hpp"
#include "precond.hpp"

namespace vrmhd {

// Frozen data for one Picard sweep of the magnetic subsystem.
struct AlfvenOperatorCtx {
  EdgeField B_frozen;  // (1-theta) B^n + theta B^{n+1,r}
  FaceField D;         // 1 / (4 pi rho_f)
  double dt = 0.0;
  double theta = 1.0;
  double eta = 0.0;
  StabCoeffs s;
};

inline AlfvenOperatorCtx make_alfven_ctx(const EdgeField& B_n, const EdgeField& B_r, const CellField& rho_next,
                                         const StabCoeffs& s, double dt, double theta, double eta) {
  AlfvenOperatorCtx ctx;
  ctx.B_frozen = (1.0 - theta) * B_n + theta * B_r;
  const FaceField rf = face_density(rho_next);
  ctx.D = face_field(rho_next.g);
  for (int a = 0; a < 3; ++a)
    for (std::size_t q = 0; q < rf[a].v.size(); ++q) {
      if (!(rf[a].v[q] > 0.0)) throw InvalidState("alfven ctx: non-positive face density");
      ctx.D[a].v[q] = 1.0 / (kFourPi * rf[a].v[q]);
    }
  ctx.dt = dt;
  ctx.theta = theta;
  ctx.eta = eta;
  ctx.s = s;
  return ctx;
}

namespace detail {

inline FaceField scale(FaceField f, const FaceField& w) {
  for (int a = 0; a < 3; ++a) f[a] = hadamard(f[a], w[a]);
  return f;
}

// D M J with M w = w x B_frozen: the velocity response to the current J.
inline FaceField lorentz_response(const AlfvenOperatorCtx& c, const FaceField& J) {
  return scale(cross_fe(J, c.B_frozen), c.D);
}

}  // namespace detail

// x + theta^2 dt^2 C M^T D M C^T x + theta dt C (eta + s) C^T x
inline EdgeField apply_alfven(const AlfvenOperatorCtx& c, const EdgeField& x) {
  const FaceField J = curl_e2f(x);
  FaceField E = cross_fe(detail::lorentz_response(c, J), c.B_frozen);
  E *= -c.theta * c.theta * c.dt * c.dt;
  axpy(c.theta * c.dt, resistive_curl(x, c.eta, c.s), E);
  EdgeField y = x;
  y += curl_f2e(E);
  return y;
}

// B^n + dt C [ M v_e + theta(1-theta) dt M D M C^T B^n - (1-theta)(eta + s) C^T B^n ]
inline EdgeField alfven_rhs(const AlfvenOperatorCtx& c, const EdgeField& B_n, const FaceField& v_e) {
  FaceField E = cross_fe(v_e, c.B_frozen);
  const double th = c.theta;
  if (th < 1.0) {
    const FaceField Jn = curl_e2f(B_n);
    axpy(th * (1.0 - th) * c.dt, cross_fe(detail::lorentz_response(c, Jn), c.B_frozen), E);
    axpy(-(1.0 - th), resistive_curl(B_n, c.eta, c.s), E);
  }
  EdgeField b = B_n;
  axpy(c.dt, curl_f2e(E), b);
  return b;
}

// Zeroes edge slots lying on an outflow boundary (shifted along that axis).
inline void zero_outflow_boundary(EdgeField& x) {
  const Grid& g = x.grid();
  for (int c = 0; c < 3; ++c) {
    Field& f = x[c];
    const auto e = g.extents(f.loc);
    for (int a = 0; a < 3; ++a) {
      if (g.periodic(a) || !is_shifted(f.loc, a)) continue;
      std::size_t q = 0;
      for (int k = 0; k < e[2]; ++k)
        for (int j = 0; j < e[1]; ++j)
          for (int i = 0; i < e[0]; ++i, ++q) {
            const int idx = a == 0 ? i : (a == 1 ? j : k);
            if (idx == 0 || idx == e[a] - 1) f.v[q] = 0.0;
          }
    }
  }
}

inline bool has_outflow(const Grid& g) { return !g.periodic(0) || !g.periodic(1) || !g.periodic(2); }

// The clamped boundary stencils are not adjoint, so on outflow grids the boundary edge slots are
// held fixed during the solve: the operator acts as the identity there and on the interior block
// it is symmetric.
inline EdgeField apply_alfven_interior(const AlfvenOperatorCtx& c, const EdgeField& x) {
  if (!has_outflow(x.grid())) return apply_alfven(c, x);
  EdgeField xi = x;
  zero_outflow_boundary(xi);
  EdgeField y = apply_alfven(c, xi);
  zero_outflow_boundary(y);
  EdgeField xb = x;
  xb -= xi;
  y += xb;
  return y;
}

struct BStageResult {
  EdgeField B_new;    // B^n - dt C E_f
  EdgeField B_theta;  // (1-theta) B^n + theta B^{n+1}
  FaceField v_new;    // non-conservative face velocity after the Lorentz kick
  FaceField E_f;      // face electric field used for the update
  SolveStats stats;
};

// One Picard sweep. v_n: face velocity at t^n; v_star: explicit face velocity including the
// current pressure-gradient estimate.
inline BStageResult solve_alfven_sweep(const EdgeField& B_n, const EdgeField& B_r, const FaceField& v_n,
                                       const FaceField& v_star, const CellField& rho_next, const StabCoeffs& s,
                                       const Params& pr, double dt, double cg_tol) {
  const double th = pr.theta_b;
  const AlfvenOperatorCtx ctx = make_alfven_ctx(B_n, B_r, rho_next, s, dt, th, pr.eta);
  const FaceField v_e = (1.0 - th) * v_n + th * v_star;
  const EdgeField b = alfven_rhs(ctx, B_n, v_e);
  // Solve for the correction to B_frozen: a large uniform background would otherwise be
  // differenced inside the stiff operator and its rounding amplified.
  EdgeField r0 = b;
  r0 -= apply_alfven(ctx, ctx.B_frozen);
  if (has_outflow(b.grid())) zero_outflow_boundary(r0);
  EdgeField zero = r0;
  zero *= 0.0;
  const auto A = [&](const EdgeField& x) { return apply_alfven_interior(ctx, x); };
  const double bn = std::sqrt(dot(b, b));
  auto res = pr.line_precond ? pcg_solve(A, LineBlockJacobi(A, r0, 3), r0, zero, cg_tol, pr.cg_maxit, bn)
                             : cg_solve(A, r0, zero, cg_tol, pr.cg_maxit, bn);
  if (!res.stats.converged)
    throw SolverFailure("magnetic solve: CG did not converge (residual " +
                        std::to_string(res.stats.final_residual) + " after " +
                        std::to_string(res.stats.iterations) + " iterations)");
  BStageResult out;
  out.stats = res.stats;
  FaceField J = curl_e2f((1.0 - th) * B_n + th * ctx.B_frozen);
  axpy(th, curl_e2f(res.x), J);
  out.v_new = v_star;
  axpy(dt, detail::lorentz_response(ctx, J), out.v_new);
  const FaceField v_theta = (1.0 - th) * v_n + th * out.v_new;
  out.E_f = J;
  for (int a = 0; a < 3; ++a)
    for (std::size_t q = 0; q < J[a].v.size(); ++q) out.E_f[a].v[q] *= pr.eta + s.s[a].v[q];
  axpy(-1.0, cross_fe(v_theta, ctx.B_frozen), out.E_f);
  // Rebuilding B from the curl keeps the node divergence at its previous value to round-off.
  out.B_new = B_n;
  axpy(-dt, curl_f2e(out.E_f), out.B_new);
  out.B_theta = (1.0 - th) * B_n + th * out.B_new;
  return out;
}

// Magnetic stress m I - B B / 4 pi through every face, with B averaged from edges to faces.
inline std::array<FaceField, 3> magnetic_stress(const EdgeField& B) {
  const Grid& g = B.grid();
  std::array<FaceField, 3> F{face_field(g), face_field(g), face_field(g)};
  for (int a = 0; a < 3; ++a) {
    const Loc fa = face_loc(a);
    std::array<Field, 3> Bf{avg_to(B[0], fa), avg_to(B[1], fa), avg_to(B[2], fa)};
    for (std::size_t q = 0; q < Bf[0].v.size(); ++q) {
      const double b2 = Bf[0].v[q] * Bf[0].v[q] + Bf[1].v[q] * Bf[1].v[q] + Bf[2].v[q] * Bf[2].v[q];
      for (int c = 0; c < 3; ++c)
        F[c][a].v[q] = (c == a ? b2 / kEightPi : 0.0) - Bf[a].v[q] * Bf[c].v[q] / kFourPi;
    }
  }
  return F;
}

// Q~ = Q* - dt div F^b: magnetic stress for momentum, Poynting flux for energy. Mass unchanged.
inline Conserved momentum_energy_reupdate(const Conserved& Q_star, double dt, const EdgeField& B_theta,
                                          const FaceField& E_f, FluxTally* tally = nullptr) {
  Conserved Q = Q_star;
  const auto S = magnetic_stress(B_theta);
  for (int c = 0; c < 3; ++c) apply_flux(Q.mom[c], S[c], dt, tally ? &tally->mom[c] : nullptr);
  FaceField P = cross_fe(E_f, B_theta);
  P *= 1.0 / kFourPi;
  apply_flux(Q.E, P, dt, tally ? &tally->energy : nullptr);
  return Q;
}

}  // namespace vrmhd
