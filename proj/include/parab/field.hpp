#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parab/grid.hpp"

namespace parab {

enum class Rank { Scalar, Vector, Matrix };

inline int rank_components(Rank r, const GridSpec& g) {
  switch (r) {
    case Rank::Scalar: return 1;
    case Rank::Vector: return g.ncomp;
    case Rank::Matrix: return g.n * g.ncomp;
  }
  return 1;
}

// Sampled function on a space-time grid. Storage is t-major, then space
// (x slowest, y fastest for n=2), then component.
class SpaceTimeField {
public:
  SpaceTimeField() = default;
  SpaceTimeField(const GridSpec& grid, Rank rank, double init = 0.0)
      : grid_(grid), rank_(rank), comps_(rank_components(rank, grid)),
        values_(static_cast<size_t>(grid.total_cells()) * comps_, init) {}

  const GridSpec& grid() const { return grid_; }
  Rank rank() const { return rank_; }
  int components() const { return comps_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  size_t index(int m, int i, int j, int c) const {
    const int ny = grid_.n == 2 ? grid_.cells[1] : 1;
    return ((static_cast<size_t>(m) * grid_.cells[0] + i) * ny + j) * comps_ + c;
  }

  double& at(int m, int i, int j = 0, int c = 0) { return values_[index(m, i, j, c)]; }
  double at(int m, int i, int j = 0, int c = 0) const { return values_[index(m, i, j, c)]; }

  // Euclidean magnitude across components at one cell
  double magnitude(int m, int i, int j = 0) const {
    if (comps_ == 1) return std::abs(values_[index(m, i, j, 0)]);
    double s = 0.0;
    const size_t base = index(m, i, j, 0);
    for (int c = 0; c < comps_; ++c) s += values_[base + c] * values_[base + c];
    return std::sqrt(s);
  }

  bool finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  template <typename F>
  void fill(F&& f) {  // f(m, i, j, c) -> value
    const int ny = grid_.n == 2 ? grid_.cells[1] : 1;
    for (int m = 0; m < grid_.steps; ++m)
      for (int i = 0; i < grid_.cells[0]; ++i)
        for (int j = 0; j < ny; ++j)
          for (int c = 0; c < comps_; ++c) values_[index(m, i, j, c)] = f(m, i, j, c);
  }

  SpaceTimeField& operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
  }
  SpaceTimeField& operator+=(const SpaceTimeField& o) {
    if (o.values_.size() != values_.size()) throw std::invalid_argument("field: shape mismatch");
    for (size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  SpaceTimeField& operator-=(const SpaceTimeField& o) {
    if (o.values_.size() != values_.size()) throw std::invalid_argument("field: shape mismatch");
    for (size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }

private:
  GridSpec grid_;
  Rank rank_ = Rank::Scalar;
  int comps_ = 1;
  std::vector<double> values_;
};

inline SpaceTimeField scaled(SpaceTimeField f, double c) {
  f *= c;
  return f;
}

// pointwise |field| as a scalar field (Euclidean norm over components)
inline SpaceTimeField magnitude_field(const SpaceTimeField& f) {
  SpaceTimeField out(f.grid(), Rank::Scalar);
  const GridSpec& g = f.grid();
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) out.at(m, i, j) = f.magnitude(m, i, j);
  return out;
}

// --- serialization -----------------------------------------------------

inline const char* rank_name(Rank r) {
  switch (r) {
    case Rank::Scalar: return "scalar";
    case Rank::Vector: return "vector";
    case Rank::Matrix: return "matrix";
  }
  return "scalar";
}

inline Rank rank_from_name(const std::string& s) {
  if (s == "scalar") return Rank::Scalar;
  if (s == "vector") return Rank::Vector;
  if (s == "matrix") return Rank::Matrix;
  throw std::invalid_argument("unknown rank: " + s);
}

// CSV: header line with the grid descriptor, then one row per cell in
// storage order (t-major, then space, then component columns).
inline void write_field_csv(const SpaceTimeField& f, std::ostream& os) {
  const GridSpec& g = f.grid();
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "# parab-field n=%d N=%d Lx=%.17g Ly=%.17g T=%.17g nx=%d ny=%d nt=%d "
                "h=%.17g tau=%.17g rank=%s bx=%d by=%d\n",
                g.n, g.ncomp, g.extent[0], g.extent[1], g.time_extent, g.cells[0],
                g.n == 2 ? g.cells[1] : 1, g.steps, g.h(0), g.tau(), rank_name(f.rank()),
                g.boundary[0] == Boundary::Periodic ? 1 : 0,
                g.boundary[1] == Boundary::Periodic ? 1 : 0);
  os << buf << "t,i,j,values...\n";
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        os << m << ',' << i << ',' << j;
        for (int c = 0; c < f.components(); ++c) {
          std::snprintf(buf, sizeof buf, ",%.17g", f.at(m, i, j, c));
          os << buf;
        }
        os << '\n';
      }
}

inline SpaceTimeField read_field_csv(std::istream& is) {
  std::string header;
  std::getline(is, header);
  GridSpec g;
  char rankbuf[16] = {0};
  int ny = 1, bx = 0, by = 0;
  double h = 0, tau = 0;
  if (std::sscanf(header.c_str(),
                  "# parab-field n=%d N=%d Lx=%lf Ly=%lf T=%lf nx=%d ny=%d nt=%d h=%lf "
                  "tau=%lf rank=%15s bx=%d by=%d",
                  &g.n, &g.ncomp, &g.extent[0], &g.extent[1], &g.time_extent, &g.cells[0],
                  &ny, &g.steps, &h, &tau, rankbuf, &bx, &by) != 13)
    throw std::invalid_argument("field csv: bad header");
  if (g.n == 2) g.cells[1] = ny;
  g.boundary[0] = bx ? Boundary::Periodic : Boundary::DirichletZero;
  g.boundary[1] = by ? Boundary::Periodic : Boundary::DirichletZero;
  g.validate();
  std::string colline;
  std::getline(is, colline);
  std::string rk(rankbuf);
  rk = rk.substr(0, rk.find_first_of(" \t\r"));
  SpaceTimeField f(g, rank_from_name(rk));
  const int nyc = g.n == 2 ? g.cells[1] : 1;
  std::string line;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < nyc; ++j) {
        if (!std::getline(is, line)) throw std::invalid_argument("field csv: truncated");
        const char* p = line.c_str();
        char* end = nullptr;
        std::strtol(p, &end, 10);  p = end + 1;
        std::strtol(p, &end, 10);  p = end + 1;
        std::strtol(p, &end, 10);  p = end;
        for (int c = 0; c < f.components(); ++c) {
          if (*p != ',') throw std::invalid_argument("field csv: short row");
          f.at(m, i, j, c) = std::strtod(p + 1, &end);
          p = end;
        }
      }
  return f;
}

inline void save_field_csv(const SpaceTimeField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_field_csv(f, os);
}

inline SpaceTimeField load_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field_csv(is);
}

}  // namespace parab
