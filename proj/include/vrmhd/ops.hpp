#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "fields.hpp"
#include "grid.hpp"

namespace vrmhd {

// Edge curl of a face field: (curl E)_x = d_y E_z - d_z E_y, cyclic.
inline EdgeField curl_f2e(const FaceField& E) {
  EdgeField r = edge_field(E.grid());
  r[0] = diff(E[2], 1) - diff(E[1], 2);
  r[1] = diff(E[0], 2) - diff(E[2], 0);
  r[2] = diff(E[1], 0) - diff(E[0], 1);
  return r;
}

// Face curl of an edge field. Under periodic boundaries this is the transpose of curl_f2e.
inline FaceField curl_e2f(const EdgeField& B) {
  FaceField r = face_field(B.grid());
  r[0] = diff(B[2], 1) - diff(B[1], 2);
  r[1] = diff(B[0], 2) - diff(B[2], 0);
  r[2] = diff(B[1], 0) - diff(B[0], 1);
  return r;
}

inline NodeField div_e2n(const EdgeField& B) {
  return diff(B[0], 0) + diff(B[1], 1) + diff(B[2], 2);
}

inline CellField div_f2c(const FaceField& F) {
  return diff(F[0], 0) + diff(F[1], 1) + diff(F[2], 2);
}

inline FaceField grad_c2f(const CellField& p) {
  if (p.loc != Loc::Cell) throw StaggeringMismatch("grad_c2f: input is not cell-centred");
  return {{diff(p, 0), diff(p, 1), diff(p, 2)}};
}

// v x B on faces. For the x component: v_y is averaged (along x) to z-edges, multiplied by B_z,
// then averaged (along y) to x-faces; likewise for v_z B_y. As a map on v this is antisymmetric.
inline FaceField cross_fe(const FaceField& v, const EdgeField& B) {
  FaceField r = face_field(v.grid());
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    // (v x B)_a = v_b B_c - v_c B_b; v_b sits on Face_b, B_c on Edge_c, Face_b -> Edge_c toggles axis a.
    const Field t1 = avg(hadamard(avg(v[b], a), B[c]), b);
    const Field t2 = avg(hadamard(avg(v[c], a), B[b]), c);
    r[a] = t1 - t2;
  }
  return r;
}

// Per-face-component stabilization speeds, already symmetrized (one field per component).
struct StabCoeffs {
  FaceField s;
};

inline StabCoeffs zero_stab(const Grid& g) { return {face_field(g)}; }

namespace detail {

// out[i] = max(in[i-1], in[i], in[i+1]) along axis a at the same location.
inline Field local_max3(const Field& in, int a) {
  Field out(in.g, in.loc);
  const auto e = in.g.extents(in.loc);
  std::size_t q = 0;
  for (int k = 0; k < e[2]; ++k)
    for (int j = 0; j < e[1]; ++j)
      for (int i = 0; i < e[0]; ++i, ++q) {
        int lo[3] = {i, j, k}, hi[3] = {i, j, k};
        lo[a] -= 1;
        hi[a] += 1;
        out.v[q] = std::max({in.v[q], in.get(lo[0], lo[1], lo[2]), in.get(hi[0], hi[1], hi[2])});
      }
  return out;
}

// Two-point max moving f to the location toggled along axis a.
inline Field max_shift(const Field& in, int a) {
  const Loc lo = toggle(in.loc, a);
  Field out(in.g, lo);
  const auto e = in.g.extents(lo);
  const bool to_shifted = is_shifted(lo, a);
  std::size_t q = 0;
  for (int k = 0; k < e[2]; ++k)
    for (int j = 0; j < e[1]; ++j)
      for (int i = 0; i < e[0]; ++i, ++q) {
        int l[3] = {i, j, k}, r[3] = {i, j, k};
        if (to_shifted)
          l[a] -= 1;
        else
          r[a] += 1;
        out.v[q] = std::max(in.get(l[0], l[1], l[2]), in.get(r[0], r[1], r[2]));
      }
  return out;
}

inline Field max_to(Field f, Loc target) {
  const std::uint8_t m = shift_mask(f.loc) ^ shift_mask(target);
  for (int a = 0; a < 3; ++a)
    if ((m >> a) & 1u) f = max_shift(f, a);
  return f;
}

}  // namespace detail

// s_d = alpha * dx_d / 2 * local max |v_d|, carried to each face component that differentiates
// along d and symmetrized by taking the larger of the two transverse values.
inline StabCoeffs stab_coeffs(const FaceField& v, double alpha) {
  if (!(alpha >= 0.0)) throw InvalidParams("stab_coeffs: alpha must be non-negative");
  const Grid& g = v.grid();
  StabCoeffs out = zero_stab(g);
  if (alpha == 0.0) return out;
  std::array<Field, 3> sd;
  for (int d = 0; d < 3; ++d) {
    Field a = v[d];
    for (double& x : a.v) x = std::abs(x);
    sd[d] = detail::local_max3(a, d);
    sd[d] *= 0.5 * alpha * g.d[d];
  }
  for (int a = 0; a < 3; ++a) {
    Field& s = out.s[a];
    for (int t = 1; t <= 2; ++t) {
      const int d = (a + t) % 3;
      if (g.degenerate(d)) continue;
      const Field m = detail::max_to(sd[d], face_loc(a));
      for (std::size_t q = 0; q < s.v.size(); ++q) s.v[q] = std::max(s.v[q], m.v[q]);
    }
  }
  return out;
}

// (eta + s) * (curl_e2f B), component by component.
inline FaceField resistive_curl(const EdgeField& B, double eta, const StabCoeffs& s) {
  if (!(eta >= 0.0)) throw InvalidParams("resistive_curl: eta must be non-negative");
  FaceField J = curl_e2f(B);
  for (int a = 0; a < 3; ++a)
    for (std::size_t q = 0; q < J[a].v.size(); ++q) J[a].v[q] *= eta + s.s[a].v[q];
  return J;
}

inline FaceField divide(FaceField f, const FaceField& den) {
  for (int a = 0; a < 3; ++a)
    for (std::size_t q = 0; q < f[a].v.size(); ++q) f[a].v[q] /= den[a].v[q];
  return f;
}

inline FaceField face_density(const CellField& rho) { return {{avg(rho, 0), avg(rho, 1), avg(rho, 2)}}; }

// (curl_e2f B_arg) x B_iter / (4 pi rho_f) on faces.
inline FaceField lorentz_force(const EdgeField& B_iter, const EdgeField& B_arg, const FaceField& rho_f) {
  for (int a = 0; a < 3; ++a)
    for (double r : rho_f[a].v)
      if (!(r > 0.0)) throw InvalidState("lorentz_force: non-positive face density");
  FaceField f = cross_fe(curl_e2f(B_arg), B_iter);
  f *= 1.0 / kFourPi;
  return divide(std::move(f), rho_f);
}

}  // namespace vrmhd
