#pragma once

#include <stdexcept>

#include "parab/field.hpp"

namespace parab {

// Spatial gradient of a vector field: matrix field with components (axis, comp),
// stored as c = axis * N + comp. Central differences in the interior,
// first-order one-sided at Dirichlet walls, wraparound for periodic axes.
// Exact for fields affine in x away from one-sided stencils.
inline SpaceTimeField discrete_gradient(const SpaceTimeField& u) {
  if (u.rank() != Rank::Vector) throw std::invalid_argument("discrete_gradient: need vector field");
  const GridSpec& g = u.grid();
  SpaceTimeField grad(g, Rank::Matrix);
  const int N = g.ncomp;
  const int ny = g.n == 2 ? g.cells[1] : 1;

  auto diff = [&](int axis, int m, int i, int j, int c) -> double {
    const int nA = g.cells[axis];
    const int idx = axis == 0 ? i : j;
    const double h = g.h(axis);
    auto val = [&](int k) { return axis == 0 ? u.at(m, k, j, c) : u.at(m, i, k, c); };
    if (g.boundary[axis] == Boundary::Periodic) {
      const int ip = (idx + 1) % nA, im = (idx + nA - 1) % nA;
      return (val(ip) - val(im)) / (2.0 * h);
    }
    if (idx == 0) return (val(1) - val(0)) / h;
    if (idx == nA - 1) return (val(nA - 1) - val(nA - 2)) / h;
    return (val(idx + 1) - val(idx - 1)) / (2.0 * h);
  };

  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        for (int a = 0; a < g.n; ++a)
          for (int c = 0; c < N; ++c) grad.at(m, i, j, a * N + c) = diff(a, m, i, j, c);
  return grad;
}

}  // namespace parab
