#pragma once

#include <cmath>
#include <stdexcept>

#include "parab/field.hpp"
#include "parab/gradient.hpp"
#include "parab/grid.hpp"

namespace parab {

// Space-time extension: time range (-T, 3T) (even reflection of w about t=T,
// odd reflection of G, zero padding before 0 and after 2T), space padded by
// one domain width per side with zeros. The original grid sits at cell
// offsets (time_offset, space_offset[axis]).
struct Extension {
  GridSpec original;
  GridSpec extended;
  int time_offset = 0;
  std::array<int, 2> space_offset{0, 0};

  bool inside_original_space(int i, int j) const {
    if (i < space_offset[0] || i >= space_offset[0] + original.cells[0]) return false;
    if (original.n == 2 && (j < space_offset[1] || j >= space_offset[1] + original.cells[1]))
      return false;
    return true;
  }
  // time index inside (0, 2T): original plus reflected band
  bool inside_doubled_time(int m) const {
    return m >= time_offset && m < time_offset + 2 * original.steps;
  }
};

inline Extension make_extension(const GridSpec& g) {
  Extension e;
  e.original = g;
  GridSpec x = g;
  x.time_extent = 4.0 * g.time_extent;
  x.steps = 4 * g.steps;
  x.origin_t = -g.time_extent;
  for (int a = 0; a < g.n; ++a) {
    x.extent[a] = 3.0 * g.extent[a];
    x.cells[a] = 3 * g.cells[a];
    x.origin_x[a] = -g.extent[a];
    x.boundary[a] = Boundary::DirichletZero;
  }
  e.extended = x;
  e.time_offset = g.steps;
  e.space_offset = {g.cells[0], g.n == 2 ? g.cells[1] : 0};
  return e;
}

struct ExtendedPair {
  Extension ext;
  SpaceTimeField w;  // even time reflection about T, zero padded
  SpaceTimeField G;  // odd time reflection, zero padded
};

// Maximum boundary-trace magnitude at Dirichlet walls, with the face value
// linearly extrapolated from the first two cells (cell-centered fields carry
// their trace at the wall face, not at the first center).
inline double wall_trace(const SpaceTimeField& w) {
  const GridSpec& g = w.grid();
  double mx = 0.0;
  const int ny = g.n == 2 ? g.cells[1] : 1;
  const int N = w.components();
  auto face = [&](double u1, double u2) { return 1.5 * u1 - 0.5 * u2; };
  for (int m = 0; m < g.steps; ++m) {
    if (g.boundary[0] == Boundary::DirichletZero)
      for (int j = 0; j < ny; ++j)
        for (int c = 0; c < N; ++c) {
          mx = std::max(mx, std::abs(face(w.at(m, 0, j, c), w.at(m, 1, j, c))));
          const int nx = g.cells[0];
          mx = std::max(mx, std::abs(face(w.at(m, nx - 1, j, c), w.at(m, nx - 2, j, c))));
        }
    if (g.n == 2 && g.boundary[1] == Boundary::DirichletZero)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int c = 0; c < N; ++c) {
          mx = std::max(mx, std::abs(face(w.at(m, i, 0, c), w.at(m, i, 1, c))));
          mx = std::max(mx, std::abs(face(w.at(m, i, ny - 1, c), w.at(m, i, ny - 2, c))));
        }
  }
  return mx;
}

// Extend a (w, G) pair fulfilling the discrete divergence identity. The
// zero-Dirichlet precondition is guarded relative to the field's sup norm;
// extrapolated face traces of legitimate zero-trace inputs carry an
// O(h^2 u'') discretization artifact, so the default gate only rejects
// grossly nonvanishing traces.
inline ExtendedPair extend_spacetime(const SpaceTimeField& w, const SpaceTimeField& G,
                                     double trace_tol_rel = 0.5) {
  const GridSpec& g = w.grid();
  if (!G.grid().same_layout(g)) throw std::invalid_argument("extend: grid mismatch");
  double wmax = 0.0;
  for (double v : w.values()) wmax = std::max(wmax, std::abs(v));
  const double tr = wall_trace(w);
  if (!(tr <= trace_tol_rel * std::max(wmax, 1e-300)))
    throw std::invalid_argument("extend: nonzero Dirichlet trace " + std::to_string(tr));
  ExtendedPair out{make_extension(g), {}, {}};
  const Extension& e = out.ext;
  out.w = SpaceTimeField(e.extended, w.rank());
  out.G = SpaceTimeField(e.extended, G.rank());
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        const int mi = e.time_offset + m;
        const int mr = e.time_offset + 2 * g.steps - 1 - m;  // reflected about t = T
        const int ii = e.space_offset[0] + i;
        const int jj = g.n == 2 ? e.space_offset[1] + j : 0;
        for (int c = 0; c < w.components(); ++c) {
          const double v = w.at(m, i, j, c);
          out.w.at(mi, ii, jj, c) = v;
          out.w.at(mr, ii, jj, c) = v;
        }
        for (int c = 0; c < G.components(); ++c) {
          const double v = G.at(m, i, j, c);
          out.G.at(mi, ii, jj, c) = v;
          out.G.at(mr, ii, jj, c) = -v;
        }
      }
  return out;
}

// weight extension: reflect about T in time, clamp outside, clamp to the
// nearest domain cell in space; stays strictly positive
inline SpaceTimeField extend_weight(const SpaceTimeField& omega, const Extension& e) {
  if (omega.rank() != Rank::Scalar) throw std::invalid_argument("extend_weight: scalar only");
  const GridSpec& g = e.original;
  SpaceTimeField out(e.extended, Rank::Scalar);
  const int ny = e.extended.n == 2 ? e.extended.cells[1] : 1;
  auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
  for (int m = 0; m < e.extended.steps; ++m)
    for (int i = 0; i < e.extended.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        int ms = m - e.time_offset;
        if (ms >= g.steps) ms = 2 * g.steps - 1 - ms;  // reflect about T
        ms = clampi(ms, 0, g.steps - 1);
        const int is = clampi(i - e.space_offset[0], 0, g.cells[0] - 1);
        const int js = g.n == 2 ? clampi(j - e.space_offset[1], 0, g.cells[1] - 1) : 0;
        out.at(m, i, j) = omega.at(ms, is, js);
      }
  return out;
}

// Gradient of an extended vector field: zero outside the original spatial
// domain (the zero extension of a W^{1,q}_0 function has zero gradient
// there), Dirichlet-style one-sided stencils at the domain walls. With this
// convention the measure-doubling identity for |grad w|^q is exact.
inline SpaceTimeField extended_gradient(const SpaceTimeField& wext, const Extension& e) {
  const GridSpec& gx = e.extended;
  const GridSpec& g = e.original;
  SpaceTimeField grad(gx, Rank::Matrix);
  const int N = gx.ncomp;
  const int ny = gx.n == 2 ? gx.cells[1] : 1;
  auto diff = [&](int axis, int m, int i, int j, int c) -> double {
    const int idx = axis == 0 ? i : j;
    const int lo = e.space_offset[axis];
    const int hi = lo + g.cells[axis] - 1;
    if (idx < lo || idx > hi) return 0.0;
    const double h = gx.h(axis);
    auto val = [&](int k) { return axis == 0 ? wext.at(m, k, j, c) : wext.at(m, i, k, c); };
    if (g.boundary[axis] == Boundary::Periodic) {
      const int span = g.cells[axis];
      const int ip = lo + (idx - lo + 1) % span, im = lo + (idx - lo + span - 1) % span;
      return (val(ip) - val(im)) / (2.0 * h);
    }
    if (idx == lo) return (val(lo + 1) - val(lo)) / h;
    if (idx == hi) return (val(hi) - val(hi - 1)) / h;
    return (val(idx + 1) - val(idx - 1)) / (2.0 * h);
  };
  for (int m = 0; m < gx.steps; ++m)
    for (int i = 0; i < gx.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        for (int a = 0; a < gx.n; ++a)
          for (int c = 0; c < N; ++c) grad.at(m, i, j, a * N + c) = diff(a, m, i, j, c);
  return grad;
}

}  // namespace parab
