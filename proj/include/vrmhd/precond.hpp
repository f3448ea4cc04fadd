#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "fields.hpp"
#include "grid.hpp"

namespace vrmhd {

namespace detail {

inline std::vector<Field*> comps(Field& f) { return {&f}; }
inline std::vector<Field*> comps(Vec3Field& f) { return {&f.c[0], &f.c[1], &f.c[2]}; }
inline std::vector<const Field*> comps(const Field& f) { return {&f}; }
inline std::vector<const Field*> comps(const Vec3Field& f) { return {&f.c[0], &f.c[1], &f.c[2]}; }

// Colouring of one index axis such that equal colours are more than 2w apart (wrap included).
inline int probe_color(int i, int ext, int w) {
  const int P = 2 * w + 1;
  if (ext <= P) return i;
  const int m = ext / P;
  return i < m * P ? i % P : P + (i - m * P);
}
inline int probe_colors(int ext, int w) {
  const int P = 2 * w + 1;
  return ext <= P ? ext : P + ext % P;
}

}  // namespace detail

// Block-Jacobi preconditioner whose blocks are whole grid lines along the longest axis, all
// components together. Blocks are read off the matrix-free operator by coloured probing (exact
// when the stencil reaches at most w indices per axis) and factored by banded Cholesky. On a
// one-dimensional grid the single block is the full operator.
class LineBlockJacobi {
 public:
  template <class V, class Apply>
  LineBlockJacobi(Apply&& apply, const V& proto, int w) {
    const auto cs = detail::comps(proto);
    const int nc = int(cs.size());
    const Grid& g = cs[0]->g;
    axis_ = 0;
    for (int a = 1; a < 3; ++a)
      if (g.n[a] > g.n[axis_]) axis_ = a;
    const int t1 = (axis_ + 1) % 3, t2 = (axis_ + 2) % 3;

    // line membership: key (comp-independent transverse indices) -> line id; dofs ordered (pos, comp)
    std::map<std::pair<int, int>, int> key;
    pos_.resize(nc);
    for (int c = 0; c < nc; ++c) {
      const auto e = g.extents(cs[c]->loc);
      pos_[c].resize(cs[c]->v.size());
      std::size_t q = 0;
      for (int k = 0; k < e[2]; ++k)
        for (int j = 0; j < e[1]; ++j)
          for (int i = 0; i < e[0]; ++i, ++q) {
            const std::array<int, 3> ijk{i, j, k};
            auto [it, fresh] = key.try_emplace({ijk[t1], ijk[t2]}, int(lines_.size()));
            if (fresh) lines_.emplace_back();
            lines_[it->second].dofs.push_back({c, q, ijk[axis_]});
            pos_[c][q] = {it->second, 0};
          }
    }
    band_ = (w + 1) * nc;
    for (int l = 0; l < int(lines_.size()); ++l) {
      Line& L = lines_[l];
      std::stable_sort(L.dofs.begin(), L.dofs.end(), [](const Dof& x, const Dof& y) {
        return x.pos != y.pos ? x.pos < y.pos : x.comp < y.comp;
      });
      for (int m = 0; m < int(L.dofs.size()); ++m) pos_[L.dofs[m].comp][L.dofs[m].q].second = m;
      L.a.assign(L.dofs.size() * (band_ + 1), 0.0);
    }

    // probing
    for (int c = 0; c < nc; ++c) {
      const auto e = g.extents(cs[c]->loc);
      const std::array<int, 3> ncol{detail::probe_colors(e[0], w), detail::probe_colors(e[1], w),
                                    detail::probe_colors(e[2], w)};
      for (int c2 = 0; c2 < ncol[2]; ++c2)
        for (int c1 = 0; c1 < ncol[1]; ++c1)
          for (int c0 = 0; c0 < ncol[0]; ++c0) {
            V probe = proto;
            probe *= 0.0;
            std::vector<std::array<int, 3>> hit;
            Field& pf = *detail::comps(probe)[c];
            std::size_t q = 0;
            for (int k = 0; k < e[2]; ++k)
              for (int j = 0; j < e[1]; ++j)
                for (int i = 0; i < e[0]; ++i, ++q)
                  if (detail::probe_color(i, e[0], w) == c0 && detail::probe_color(j, e[1], w) == c1 &&
                      detail::probe_color(k, e[2], w) == c2) {
                    pf.v[q] = 1.0;
                    hit.push_back({i, j, k});
                  }
            if (hit.empty()) continue;
            const V y = apply(probe);
            const auto ys = detail::comps(y);
            for (const auto& h : hit) {
              const std::size_t qc = g.index(cs[c]->loc, h[0], h[1], h[2]);
              const auto [line, col] = pos_[c][qc];
              for (int c3 = 0; c3 < nc; ++c3) {
                const auto e3 = g.extents(cs[c3]->loc);
                std::array<int, 3> r = h;
                bool inside = true;
                for (int a = 0; a < 3; ++a)
                  if (a != axis_ && r[a] >= e3[a]) inside = false;
                if (!inside) continue;
                std::vector<int> seen;
                for (int d = -w; d <= w; ++d) {
                  int i = h[axis_] + d;
                  if (g.periodic(axis_))
                    i = ((i % e3[axis_]) + e3[axis_]) % e3[axis_];
                  else if (i < 0 || i >= e3[axis_])
                    continue;
                  if (std::find(seen.begin(), seen.end(), i) != seen.end()) continue;
                  seen.push_back(i);
                  r[axis_] = i;
                  const std::size_t qr = g.index(cs[c3]->loc, r[0], r[1], r[2]);
                  const auto [line_r, row] = pos_[c3][qr];
                  if (line_r != line || row < col) continue;  // lower triangle of the own block
                  set_entry(lines_[line], row, col, ys[c3]->v[qr]);
                }
              }
            }
          }
    }
    for (Line& L : lines_) factor(L);
  }

  template <class V>
  V operator()(const V& r) const {
    V z = r;
    auto zs = detail::comps(z);
    const auto rs = detail::comps(r);
    std::vector<double> b;
    for (const Line& L : lines_) {
      const int n = int(L.dofs.size());
      b.resize(n);
      for (int m = 0; m < n; ++m) b[m] = rs[L.dofs[m].comp]->v[L.dofs[m].q];
      solve(L, b);
      for (int m = 0; m < n; ++m) zs[L.dofs[m].comp]->v[L.dofs[m].q] = b[m];
    }
    return z;
  }

  int axis() const { return axis_; }
  std::size_t lines() const { return lines_.size(); }

 private:
  struct Dof {
    int comp;
    std::size_t q;
    int pos;
  };
  struct Line {
    std::vector<Dof> dofs;
    std::vector<double> a;  // lower band, a[i*(band+1) + d] = A(i, i-d); Cholesky factor after factor()
    std::vector<double> extra_diag;
    bool diagonal_only = false;
  };

  void set_entry(Line& L, int row, int col, double v) {
    const int d = row - col;
    if (d <= band_) {
      L.a[std::size_t(row) * (band_ + 1) + d] = v;
      return;
    }
    // periodic wrap couplings fall outside the band; dropping them with a diagonal shift keeps
    // the block positive definite
    if (L.extra_diag.empty()) L.extra_diag.assign(L.dofs.size(), 0.0);
    L.extra_diag[row] += std::abs(v);
    L.extra_diag[col] += std::abs(v);
  }

  void factor(Line& L) const {
    const int n = int(L.dofs.size()), W = band_ + 1;
    std::vector<double>& a = L.a;
    if (!L.extra_diag.empty())
      for (int i = 0; i < n; ++i) a[std::size_t(i) * W] += L.extra_diag[i];
    const std::vector<double> diag = [&] {
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) d[i] = a[std::size_t(i) * W];
      return d;
    }();
    for (int i = 0; i < n; ++i) {
      for (int d = std::min(band_, i); d >= 1; --d) {
        const int j = i - d;
        double s = a[std::size_t(i) * W + d];
        for (int k = std::max(0, i - band_); k < j; ++k)
          if (j - k <= band_) s -= a[std::size_t(i) * W + (i - k)] * a[std::size_t(j) * W + (j - k)];
        a[std::size_t(i) * W + d] = s / a[std::size_t(j) * W];
      }
      double s = a[std::size_t(i) * W];
      for (int k = std::max(0, i - band_); k < i; ++k) s -= a[std::size_t(i) * W + (i - k)] * a[std::size_t(i) * W + (i - k)];
      if (!(s > 0.0) || !std::isfinite(s)) {
        // not positive definite in floating point: fall back to the block diagonal
        L.diagonal_only = true;
        a.assign(std::size_t(n) * W, 0.0);
        for (int m = 0; m < n; ++m) a[std::size_t(m) * W] = diag[m] > 0.0 ? diag[m] : 1.0;
        return;
      }
      a[std::size_t(i) * W] = std::sqrt(s);
    }
  }

  void solve(const Line& L, std::vector<double>& b) const {
    const int n = int(b.size()), W = band_ + 1;
    const std::vector<double>& a = L.a;
    if (L.diagonal_only) {
      for (int i = 0; i < n; ++i) b[i] /= a[std::size_t(i) * W];
      return;
    }
    for (int i = 0; i < n; ++i) {
      double s = b[i];
      for (int k = std::max(0, i - band_); k < i; ++k) s -= a[std::size_t(i) * W + (i - k)] * b[k];
      b[i] = s / a[std::size_t(i) * W];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = b[i];
      for (int k = i + 1; k <= std::min(n - 1, i + band_); ++k) s -= a[std::size_t(k) * W + (k - i)] * b[k];
      b[i] = s / a[std::size_t(i) * W];
    }
  }

  int axis_ = 0;
  int band_ = 0;
  std::vector<Line> lines_;
  std::vector<std::vector<std::pair<int, int>>> pos_;  // per component: flat index -> (line, local)
};

}  // namespace vrmhd
