#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace vrmhd {

enum class Boundary : std::uint8_t { Periodic, Outflow };

// Cell: no shift. FaceS: shifted along S. EdgeS: shifted along the two axes orthogonal to S.
// Node: shifted along all three axes.
enum class Loc : std::uint8_t { Cell, FaceX, FaceY, FaceZ, EdgeX, EdgeY, EdgeZ, Node };

inline constexpr std::uint8_t shift_mask(Loc l) {
  switch (l) {
    case Loc::Cell: return 0b000;
    case Loc::FaceX: return 0b001;
    case Loc::FaceY: return 0b010;
    case Loc::FaceZ: return 0b100;
    case Loc::EdgeX: return 0b110;
    case Loc::EdgeY: return 0b101;
    case Loc::EdgeZ: return 0b011;
    case Loc::Node: return 0b111;
  }
  return 0;
}

inline constexpr Loc loc_from_mask(std::uint8_t m) {
  switch (m & 0b111) {
    case 0b000: return Loc::Cell;
    case 0b001: return Loc::FaceX;
    case 0b010: return Loc::FaceY;
    case 0b100: return Loc::FaceZ;
    case 0b110: return Loc::EdgeX;
    case 0b101: return Loc::EdgeY;
    case 0b011: return Loc::EdgeZ;
    default: return Loc::Node;
  }
}

inline constexpr bool is_shifted(Loc l, int axis) { return (shift_mask(l) >> axis) & 1u; }
inline constexpr Loc toggle(Loc l, int axis) {
  return loc_from_mask(static_cast<std::uint8_t>(shift_mask(l) ^ (1u << axis)));
}
inline constexpr Loc face_loc(int axis) { return loc_from_mask(static_cast<std::uint8_t>(1u << axis)); }
inline constexpr Loc edge_loc(int axis) {
  return loc_from_mask(static_cast<std::uint8_t>(0b111 ^ (1u << axis)));
}
inline constexpr bool is_face(Loc l) { return l == Loc::FaceX || l == Loc::FaceY || l == Loc::FaceZ; }
inline constexpr bool is_edge(Loc l) { return l == Loc::EdgeX || l == Loc::EdgeY || l == Loc::EdgeZ; }

inline const char* loc_name(Loc l) {
  switch (l) {
    case Loc::Cell: return "cell";
    case Loc::FaceX: return "face_x";
    case Loc::FaceY: return "face_y";
    case Loc::FaceZ: return "face_z";
    case Loc::EdgeX: return "edge_x";
    case Loc::EdgeY: return "edge_y";
    case Loc::EdgeZ: return "edge_z";
    case Loc::Node: return "node";
  }
  return "?";
}

// Shifted index i sits at lo + i*d; unshifted index i sits at lo + (i + 1/2)*d.
struct Grid {
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
  std::array<double, 3> d{1.0, 1.0, 1.0};
  std::array<Boundary, 3> bc{Boundary::Periodic, Boundary::Periodic, Boundary::Periodic};

  bool degenerate(int a) const { return n[a] == 1; }
  bool periodic(int a) const { return bc[a] == Boundary::Periodic; }
  int dims() const { return int(n[0] > 1) + int(n[1] > 1) + int(n[2] > 1); }

  // Outflow storage keeps the closing slot of a shifted axis; periodic storage wraps it.
  int extent(Loc l, int a) const { return n[a] + ((is_shifted(l, a) && !periodic(a)) ? 1 : 0); }
  std::array<int, 3> extents(Loc l) const { return {extent(l, 0), extent(l, 1), extent(l, 2)}; }
  std::size_t size(Loc l) const {
    return std::size_t(extent(l, 0)) * std::size_t(extent(l, 1)) * std::size_t(extent(l, 2));
  }
  std::size_t index(Loc l, int i, int j, int k) const {
    return std::size_t(i) + std::size_t(extent(l, 0)) * (std::size_t(j) + std::size_t(extent(l, 1)) * std::size_t(k));
  }
  double coord(Loc l, int a, int i) const {
    return lo[a] + (double(i) + (is_shifted(l, a) ? 0.0 : 0.5)) * d[a];
  }
  // Wrap (periodic) or clamp (outflow ghost copy) an index along axis a for location l.
  int fix(Loc l, int a, int i) const {
    const int e = extent(l, a);
    if (periodic(a)) {
      i %= e;
      return i < 0 ? i + e : i;
    }
    return i < 0 ? 0 : (i >= e ? e - 1 : i);
  }
  double cell_volume() const { return d[0] * d[1] * d[2]; }
  double min_spacing() const {
    double m = 1e300;
    for (int a = 0; a < 3; ++a)
      if (!degenerate(a)) m = std::min(m, d[a]);
    return m == 1e300 ? d[0] : m;
  }
  bool operator==(const Grid& o) const { return n == o.n && lo == o.lo && hi == o.hi && bc == o.bc; }
};

inline Grid make_grid(std::array<int, 3> n, std::array<std::array<double, 2>, 3> ext,
                      std::array<Boundary, 3> bc = {Boundary::Periodic, Boundary::Periodic,
                                                    Boundary::Periodic}) {
  Grid g;
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 1) throw InvalidGrid("non-positive cell count on axis " + std::to_string(a));
    if (!(ext[a][1] > ext[a][0])) throw InvalidGrid("empty interval on axis " + std::to_string(a));
    g.n[a] = n[a];
    g.lo[a] = ext[a][0];
    g.hi[a] = ext[a][1];
    g.d[a] = (ext[a][1] - ext[a][0]) / n[a];
    // A single-cell axis carries no derivatives; periodic wrap makes that automatic.
    g.bc[a] = n[a] == 1 ? Boundary::Periodic : bc[a];
  }
  return g;
}

// Scalar values at one staggered location.
struct Field {
  Grid g;
  Loc loc = Loc::Cell;
  std::vector<double> v;

  Field() = default;
  Field(const Grid& grid, Loc l, double value = 0.0) : g(grid), loc(l), v(grid.size(l), value) {}

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  double& at(int i, int j, int k) { return v[g.index(loc, i, j, k)]; }
  double at(int i, int j, int k) const { return v[g.index(loc, i, j, k)]; }
  // Read with wrap/clamp applied on every axis.
  double get(int i, int j, int k) const {
    return v[g.index(loc, g.fix(loc, 0, i), g.fix(loc, 1, j), g.fix(loc, 2, k))];
  }

  template <class F>
  void fill(F&& f) {
    const auto e = g.extents(loc);
    std::size_t q = 0;
    for (int k = 0; k < e[2]; ++k)
      for (int j = 0; j < e[1]; ++j)
        for (int i = 0; i < e[0]; ++i, ++q)
          v[q] = f(g.coord(loc, 0, i), g.coord(loc, 1, j), g.coord(loc, 2, k));
  }

  Field& operator+=(const Field& o) {
    for (std::size_t q = 0; q < v.size(); ++q) v[q] += o.v[q];
    return *this;
  }
  Field& operator-=(const Field& o) {
    for (std::size_t q = 0; q < v.size(); ++q) v[q] -= o.v[q];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(double s, Field a) { return a *= s; }

inline Field hadamard(Field a, const Field& b) {
  for (std::size_t q = 0; q < a.v.size(); ++q) a.v[q] *= b.v[q];
  return a;
}

namespace detail {

// out (at loc toggled along axis a) = wl*in[left] + wr*in[right], where left/right are the two
// input slots bracketing each output slot along a.
inline Field two_point(const Field& in, int a, double wl, double wr) {
  const Grid& g = in.g;
  const Loc lo = toggle(in.loc, a);
  Field out(g, lo);
  const auto ei = g.extents(in.loc);
  const auto eo = g.extents(lo);
  const bool to_shifted = is_shifted(lo, a);
  const std::size_t sx = 1, sy = std::size_t(ei[0]), sz = std::size_t(ei[0]) * std::size_t(ei[1]);
  const std::size_t stride = a == 0 ? sx : (a == 1 ? sy : sz);
  std::vector<int> left(eo[a]), right(eo[a]);
  for (int i = 0; i < eo[a]; ++i) {
    if (to_shifted) {
      left[i] = g.fix(in.loc, a, i - 1);
      right[i] = g.fix(in.loc, a, i);
    } else {
      left[i] = g.fix(in.loc, a, i);
      right[i] = g.fix(in.loc, a, i + 1);
    }
  }
  std::size_t q = 0;
  for (int k = 0; k < eo[2]; ++k)
    for (int j = 0; j < eo[1]; ++j)
      for (int i = 0; i < eo[0]; ++i, ++q) {
        const int c[3] = {i, j, k};
        const std::size_t base = std::size_t(a == 0 ? 0 : i) + sy * std::size_t(a == 1 ? 0 : j) +
                                 sz * std::size_t(a == 2 ? 0 : k);
        out.v[q] = wl * in.v[base + stride * std::size_t(left[c[a]])] +
                   wr * in.v[base + stride * std::size_t(right[c[a]])];
      }
  return out;
}

}  // namespace detail

// One-axis average; output lives at the location with the axis shift toggled.
inline Field avg(const Field& f, int axis) { return detail::two_point(f, axis, 0.5, 0.5); }

// One-axis centred difference divided by the spacing; zero along a degenerate axis.
inline Field diff(const Field& f, int axis) {
  const double inv = 1.0 / f.g.d[axis];
  return detail::two_point(f, axis, -inv, inv);
}

// Composition of one-axis averages taking f to `target`; axes are processed x, y, z.
inline Field avg_to(Field f, Loc target) {
  const std::uint8_t m = shift_mask(f.loc) ^ shift_mask(target);
  for (int a = 0; a < 3; ++a)
    if ((m >> a) & 1u) f = avg(f, a);
  return f;
}

// <<X>Y> at a face: X (edge) averaged to the cell, multiplied by Y (cell), averaged to the face.
inline Field avg2_product(const Field& x, const Field& y, Loc target) {
  if (!is_edge(x.loc) || y.loc != Loc::Cell || !is_face(target))
    throw StaggeringMismatch(std::string("avg2_product: ") + loc_name(x.loc) + " x " + loc_name(y.loc) +
                             " -> " + loc_name(target));
  if ((shift_mask(x.loc) & shift_mask(target)) == 0)
    throw StaggeringMismatch(std::string("avg2_product: edge ") + loc_name(x.loc) +
                             " shares no staggering with " + loc_name(target));
  return avg_to(hadamard(avg_to(x, Loc::Cell), y), target);
}

}  // namespace vrmhd
