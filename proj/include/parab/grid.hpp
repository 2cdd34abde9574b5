#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace parab {

enum class Boundary { DirichletZero, Periodic };

// Uniform space-time grid over Omega x (0,T).
// Cells are closed boxes; a value lives at the cell center; integrals are
// midpoint quadrature, so every norm is an exact finite sum.
struct GridSpec {
  int n = 1;                         // spatial dimension (1 or 2)
  int ncomp = 1;                     // component count N >= 1
  std::array<double, 2> extent{1.0, 1.0};
  double time_extent = 1.0;          // T
  std::array<int, 2> cells{8, 8};    // per spatial axis
  int steps = 8;                     // time cells
  std::array<Boundary, 2> boundary{Boundary::DirichletZero, Boundary::DirichletZero};
  double origin_t = 0.0;             // time coordinate of the grid start
  std::array<double, 2> origin_x{0.0, 0.0};

  double h(int axis = 0) const { return extent[axis] / cells[axis]; }
  double tau() const { return time_extent / steps; }
  double cell_volume() const {
    double v = tau();
    for (int a = 0; a < n; ++a) v *= h(a);
    return v;
  }
  long long spatial_cells() const {
    long long c = cells[0];
    if (n == 2) c *= cells[1];
    return c;
  }
  long long total_cells() const { return spatial_cells() * steps; }

  int nx(int axis) const { return axis < n ? cells[axis] : 1; }

  double xcenter(int axis, int i) const { return origin_x[axis] + (i + 0.5) * h(axis); }
  double tcenter(int m) const { return origin_t + (m + 0.5) * tau(); }

  void validate() const {
    if (n != 1 && n != 2) throw std::invalid_argument("grid: n must be 1 or 2");
    if (ncomp < 1) throw std::invalid_argument("grid: component count must be >= 1");
    if (!(time_extent > 0.0)) throw std::invalid_argument("grid: T must be positive");
    if (steps < 4) throw std::invalid_argument("grid: need at least 4 time cells");
    for (int a = 0; a < n; ++a) {
      if (!(extent[a] > 0.0)) throw std::invalid_argument("grid: extent must be positive");
      if (cells[a] < 4) throw std::invalid_argument("grid: need at least 4 cells per axis");
      if (!(h(a) > 0.0)) throw std::invalid_argument("grid: spatial step must be positive");
    }
    if (!(tau() > 0.0)) throw std::invalid_argument("grid: time step must be positive");
  }

  bool same_layout(const GridSpec& o) const {
    if (n != o.n || steps != o.steps) return false;
    for (int a = 0; a < n; ++a)
      if (cells[a] != o.cells[a]) return false;
    return true;
  }
};

// validated constructor from explicit steps; counts are derived and the
// step/extent consistency is enforced
inline GridSpec make_grid(int n, int ncomp, std::array<double, 2> extent, double T,
                          double h, double tau,
                          std::array<Boundary, 2> bc = {Boundary::DirichletZero,
                                                        Boundary::DirichletZero}) {
  if (!(h > 0.0)) throw std::invalid_argument("make_grid: h must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("make_grid: tau must be positive");
  GridSpec g;
  g.n = n;
  g.ncomp = ncomp;
  g.extent = extent;
  g.time_extent = T;
  g.boundary = bc;
  for (int a = 0; a < n; ++a) {
    double c = extent[a] / h;
    g.cells[a] = static_cast<int>(c + 0.5);
    if (std::abs(g.cells[a] * h - extent[a]) > 1e-9 * extent[a])
      throw std::invalid_argument("make_grid: h inconsistent with extent");
  }
  double s = T / tau;
  g.steps = static_cast<int>(s + 0.5);
  if (std::abs(g.steps * tau - T) > 1e-9 * T)
    throw std::invalid_argument("make_grid: tau inconsistent with T");
  g.validate();
  return g;
}

inline GridSpec make_grid_counts(int n, int ncomp, std::array<double, 2> extent, double T,
                                 std::array<int, 2> cells, int steps,
                                 std::array<Boundary, 2> bc = {Boundary::DirichletZero,
                                                               Boundary::DirichletZero}) {
  GridSpec g;
  g.n = n;
  g.ncomp = ncomp;
  g.extent = extent;
  g.time_extent = T;
  g.cells = cells;
  g.steps = steps;
  g.boundary = bc;
  g.validate();
  return g;
}

}  // namespace parab
