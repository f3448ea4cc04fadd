#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "fields.hpp"

namespace vrmhd {

struct SolveStats {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

template <class V>
struct SolveResult {
  V x;
  SolveStats stats;
};

// Preconditioned conjugate gradient for a symmetric positive (semi-)definite apply callback and
// an SPD preconditioner z = M^{-1} r. Stops on the unpreconditioned relative residual; returns the
// best iterate seen with converged=false when maxit is hit. ref_norm > 0 replaces |b| as the
// residual scale (correction-form solves).
template <class V, class Apply, class Precond>
SolveResult<V> pcg_solve(Apply&& apply, Precond&& precond, const V& b, const V& x0, double tol = 1e-10,
                         int maxit = 1000, double ref_norm = 0.0) {
  SolveResult<V> out{x0, {}};
  const double bnorm = ref_norm > 0.0 ? ref_norm : std::sqrt(dot(b, b));
  V r = b;
  r -= apply(out.x);
  double rr = dot(r, r);
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  out.stats.final_residual = std::sqrt(rr) / scale;
  if (std::sqrt(rr) <= tol * bnorm || rr == 0.0) {
    out.stats.converged = true;
    return out;
  }
  V x = out.x;
  V z = precond(r);
  V p = z;
  double rz = dot(r, z);
  double best = out.stats.final_residual;
  for (int it = 1; it <= maxit; ++it) {
    out.stats.iterations = it;
    const V Ap = apply(p);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0) || !std::isfinite(pAp)) break;
    const double alpha = rz / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    const double res = std::sqrt(dot(r, r)) / scale;
    if (res < best) {
      best = res;
      out.x = x;
      out.stats.final_residual = res;
    }
    if (res <= tol) {
      out.stats.converged = true;
      return out;
    }
    z = precond(r);
    const double rz_new = dot(r, z);
    if (!(rz_new > 0.0)) break;
    p *= rz_new / rz;
    p += z;
    rz = rz_new;
  }
  return out;
}

// Unpreconditioned conjugate gradient.
template <class V, class Apply>
SolveResult<V> cg_solve(Apply&& apply, const V& b, const V& x0, double tol = 1e-10, int maxit = 1000,
                        double ref_norm = 0.0) {
  return pcg_solve(std::forward<Apply>(apply), [](const V& r) { return r; }, b, x0, tol, maxit, ref_norm);
}

}  // namespace vrmhd
