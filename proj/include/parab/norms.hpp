#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parab/exact_sum.hpp"
#include "parab/field.hpp"

namespace parab {

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

// Bochner-Lebesgue norm as midpoint quadrature: (sum |f|^p vol)^{1/p}.
// |f| at a cell is the Euclidean magnitude over components. p = inf gives
// the max of |f|. Sums are accumulated exactly, so the result is the
// correctly rounded value of the finite sum.
inline double lp_norm(const SpaceTimeField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const GridSpec& g = f.grid();
  const int ny = g.n == 2 ? g.cells[1] : 1;
  if (p == kInfExponent) {
    double mx = 0.0;
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) mx = std::max(mx, f.magnitude(m, i, j));
    return mx;
  }
  ExactAcc acc;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) acc.add(std::pow(f.magnitude(m, i, j), p));
  const double s = acc.to_double() * g.cell_volume();
  return std::pow(s, 1.0 / p);
}

// (int |f|^p omega)^{1/p} with a strictly positive scalar weight
inline double weighted_lp_norm(const SpaceTimeField& f, const SpaceTimeField& omega, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("weighted_lp_norm: p must be >= 1");
  if (omega.rank() != Rank::Scalar)
    throw std::invalid_argument("weighted_lp_norm: weight must be scalar");
  if (!f.grid().same_layout(omega.grid()))
    throw std::invalid_argument("weighted_lp_norm: grid mismatch");
  const GridSpec& g = f.grid();
  const int ny = g.n == 2 ? g.cells[1] : 1;
  if (p == kInfExponent) {
    double mx = 0.0;
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) mx = std::max(mx, f.magnitude(m, i, j));
    return mx;
  }
  ExactAcc acc;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        const double w = omega.at(m, i, j);
        if (!(w > 0.0)) throw std::invalid_argument("weighted_lp_norm: weight must be positive");
        acc.add(std::pow(f.magnitude(m, i, j), p) * w);
      }
  const double s = acc.to_double() * g.cell_volume();
  return std::pow(s, 1.0 / p);
}

// int omega over the grid (total weighted measure)
inline double weight_mass(const SpaceTimeField& omega) {
  const GridSpec& g = omega.grid();
  const int ny = g.n == 2 ? g.cells[1] : 1;
  ExactAcc acc;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) acc.add(omega.at(m, i, j));
  return acc.to_double() * g.cell_volume();
}

}  // namespace parab
