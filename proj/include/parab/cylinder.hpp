#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "parab/field.hpp"
#include "parab/grid.hpp"

namespace parab {

enum class CylOrientation { Backward, Symmetric };

// Parabolic cylinder Q_r(z): spatial sup-metric cube of half-side r around x,
// times (t-r^2, t] (backward) or (t-r^2, t+r^2) (symmetric).
struct ParabolicCylinder {
  double x0 = 0.0, x1 = 0.0;  // anchor coordinates
  double t = 0.0;
  double r = 0.0;
  CylOrientation orientation = CylOrientation::Backward;
};

struct CellIndex {
  int m, i, j;
};

inline bool cylinder_contains(const GridSpec& g, const ParabolicCylinder& c, int m, int i,
                              int j) {
  const double xc = g.xcenter(0, i);
  if (std::abs(xc - c.x0) > c.r) return false;
  if (g.n == 2) {
    const double yc = g.xcenter(1, j);
    if (std::abs(yc - c.x1) > c.r) return false;
  }
  const double tc = g.tcenter(m);
  const double r2 = c.r * c.r;
  if (c.orientation == CylOrientation::Backward) return tc <= c.t && c.t - tc < r2;
  return tc > c.t - r2 && tc < c.t + r2;
}

// All grid cells whose centers lie in the cylinder.
inline std::vector<CellIndex> cylinder_cells(const GridSpec& g, const ParabolicCylinder& c) {
  if (!(c.r >= g.h(0) / 2)) throw std::invalid_argument("cylinder: r must be >= h/2");
  std::vector<CellIndex> out;
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        if (cylinder_contains(g, c, m, i, j)) out.push_back({m, i, j});
  if (out.empty()) throw std::runtime_error("cylinder: discretization is empty");
  return out;
}

}  // namespace parab
