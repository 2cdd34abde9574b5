#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "parab/cylinder.hpp"
#include "parab/exact_sum.hpp"
#include "parab/field.hpp"
#include "parab/parallel.hpp"

namespace parab {

// One ladder rung: dyadic radius with its integer cylinder discretization.
// Membership is index arithmetic (|i - anchor| <= irad per axis; time-slab
// offsets in [0, tdepth) backward, |offset| < tdepth symmetric), so the fast
// path and the oracle agree on member sets without floating comparisons.
struct MaximalRung {
  double r = 0.0;
  int irad = 0;
  long long tdepth = 1;
};

struct MaximalConfig {
  double q = 1.0;
  CylOrientation orientation = CylOrientation::Backward;
  std::vector<MaximalRung> rungs;

  long long full_count(const GridSpec& g, const MaximalRung& rung) const {
    long long c = 2ll * rung.irad + 1;
    if (g.n == 2) c *= 2ll * rung.irad + 1;
    c *= orientation == CylOrientation::Backward ? rung.tdepth : 2 * rung.tdepth - 1;
    return c;
  }

  static MaximalConfig make(const GridSpec& g, double q = 1.0,
                            std::optional<double> rho = std::nullopt,
                            CylOrientation orient = CylOrientation::Backward) {
    if (!(q >= 1.0)) throw std::invalid_argument("maximal: q must be >= 1");
    MaximalConfig cfg;
    cfg.q = q;
    cfg.orientation = orient;
    const double h = g.h(0);
    const double rmin = h / 2.0;
    if (rho && !(*rho >= rmin)) throw std::invalid_argument("maximal: rho below h/2");
    double cover = std::max(g.extent[0], g.n == 2 ? g.extent[1] : 0.0);
    cover = std::max(cover, std::sqrt(g.time_extent));
    double r = rmin;
    while (true) {
      if (rho && r > *rho && !cfg.rungs.empty()) break;
      MaximalRung rung;
      rung.r = r;
      rung.irad = static_cast<int>(std::floor(r / h + 1e-12));
      const double x = r * r / g.tau();
      rung.tdepth = std::max<long long>(1, static_cast<long long>(std::ceil(x * (1.0 - 1e-12))));
      cfg.rungs.push_back(rung);
      if ((rho && 2.0 * r > *rho) || (!rho && r >= cover)) break;
      r *= 2.0;
    }
    if (cfg.rungs.empty()) throw std::invalid_argument("maximal: empty ladder");
    return cfg;
  }
};

// shared cell transform: the quantity averaged over cylinders
inline double maximal_cell_power(double magnitude, double q) {
  return q == 1.0 ? magnitude : std::pow(magnitude, q);
}

namespace detail {

// exact 3D prefix sums of per-cell values (time, x, y); entry (m,i,j) holds
// the sum over cells [0,m) x [0,i) x [0,j)
class ExactPrefix {
public:
  template <typename CellFn>
  ExactPrefix(const GridSpec& g, CellFn&& cell) {
    nt_ = g.steps;
    nx_ = g.cells[0];
    ny_ = g.n == 2 ? g.cells[1] : 1;
    acc_.assign(static_cast<size_t>(nt_ + 1) * (nx_ + 1) * (ny_ + 1), ExactAcc());
    for (int m = 1; m <= nt_; ++m)
      for (int i = 1; i <= nx_; ++i)
        for (int j = 1; j <= ny_; ++j) {
          ExactAcc v;
          v.add(cell(m - 1, i - 1, j - 1));
          v.add(at(m - 1, i, j));
          v.add(at(m, i - 1, j));
          v.add(at(m, i, j - 1));
          v.sub(at(m - 1, i - 1, j));
          v.sub(at(m - 1, i, j - 1));
          v.sub(at(m, i - 1, j - 1));
          v.add(at(m - 1, i - 1, j - 1));
          at(m, i, j) = v;
        }
  }

  ExactPrefix(const SpaceTimeField& f, double q)
      : ExactPrefix(f.grid(), [&f, q](int m, int i, int j) {
          return maximal_cell_power(f.magnitude(m, i, j), q);
        }) {}

  // exact sum over cells [m0,m1) x [i0,i1) x [j0,j1), clipped to the grid
  ExactAcc range(long long m0, long long m1, long long i0, long long i1, long long j0,
                 long long j1) const {
    m0 = std::max(0ll, m0); i0 = std::max(0ll, i0); j0 = std::max(0ll, j0);
    m1 = std::min<long long>(nt_, m1); i1 = std::min<long long>(nx_, i1);
    j1 = std::min<long long>(ny_, j1);
    ExactAcc s;
    if (m0 >= m1 || i0 >= i1 || j0 >= j1) return s;
    s.add(at(m1, i1, j1));
    s.sub(at(m0, i1, j1));
    s.sub(at(m1, i0, j1));
    s.sub(at(m1, i1, j0));
    s.add(at(m0, i0, j1));
    s.add(at(m0, i1, j0));
    s.add(at(m1, i0, j0));
    s.sub(at(m0, i0, j0));
    return s;
  }

private:
  ExactAcc& at(int m, int i, int j) {
    return acc_[(static_cast<size_t>(m) * (nx_ + 1) + i) * (ny_ + 1) + j];
  }
  const ExactAcc& at(int m, int i, int j) const {
    return acc_[(static_cast<size_t>(m) * (nx_ + 1) + i) * (ny_ + 1) + j];
  }
  int nt_ = 0, nx_ = 0, ny_ = 0;
  std::vector<ExactAcc> acc_;
};

}  // namespace detail

// Parabolic Hardy-Littlewood maximal function over the dyadic radius ladder,
// with extension of f by zero outside its grid (cylinder means divide by the
// full virtual cell count). Fast path: exact summed-area table per grid.
inline SpaceTimeField maximal(const SpaceTimeField& f, const MaximalConfig& cfg) {
  if (cfg.rungs.empty()) throw std::invalid_argument("maximal: empty ladder");
  const GridSpec& g = f.grid();
  const int ny = g.n == 2 ? g.cells[1] : 1;
  detail::ExactPrefix prefix(f, cfg.q);
  SpaceTimeField out(g, Rank::Scalar);
  const bool backward = cfg.orientation == CylOrientation::Backward;
  parallel_for(static_cast<long long>(g.steps) * g.cells[0], [&](long long k) {
    const int m = static_cast<int>(k / g.cells[0]);
    const int i = static_cast<int>(k % g.cells[0]);
    for (int j = 0; j < ny; ++j) {
      double best = 0.0;
      for (const auto& rung : cfg.rungs) {
        const long long m0 = backward ? m - rung.tdepth + 1 : m - rung.tdepth + 1;
        const long long m1 = backward ? m + 1 : m + rung.tdepth;
        const ExactAcc s = prefix.range(m0, m1, i - rung.irad, i + rung.irad + 1,
                                        g.n == 2 ? j - rung.irad : 0,
                                        g.n == 2 ? j + rung.irad + 1 : 1);
        const double mean = s.to_double() / static_cast<double>(cfg.full_count(g, rung));
        best = std::max(best, mean);
      }
      out.at(m, i, j) = best;
    }
  });
  return out;
}

// Brute-force oracle: enumerates every ladder radius at every cell with naive
// per-cell summation; shares only the config geometry and the cell transform.
inline SpaceTimeField oracle_maximal(const SpaceTimeField& f, const MaximalConfig& cfg) {
  if (cfg.rungs.empty()) throw std::invalid_argument("oracle_maximal: empty ladder");
  const GridSpec& g = f.grid();
  const int ny = g.n == 2 ? g.cells[1] : 1;
  SpaceTimeField out(g, Rank::Scalar);
  const bool backward = cfg.orientation == CylOrientation::Backward;
  parallel_for(static_cast<long long>(g.steps) * g.cells[0], [&](long long k) {
    const int m = static_cast<int>(k / g.cells[0]);
    const int i = static_cast<int>(k % g.cells[0]);
    for (int j = 0; j < ny; ++j) {
      double best = 0.0;
      for (const auto& rung : cfg.rungs) {
        ExactAcc acc;
        const long long mlo = backward ? m - rung.tdepth + 1 : m - rung.tdepth + 1;
        const long long mhi = backward ? m : m + rung.tdepth - 1;
        for (long long mm = std::max(0ll, mlo); mm <= std::min<long long>(g.steps - 1, mhi); ++mm)
          for (int ii = std::max(0, i - rung.irad);
               ii <= std::min(g.cells[0] - 1, i + rung.irad); ++ii) {
            if (g.n == 2) {
              for (int jj = std::max(0, j - rung.irad);
                   jj <= std::min(g.cells[1] - 1, j + rung.irad); ++jj)
                acc.add(maximal_cell_power(f.magnitude(static_cast<int>(mm), ii, jj), cfg.q));
            } else {
              acc.add(maximal_cell_power(f.magnitude(static_cast<int>(mm), ii, 0), cfg.q));
            }
          }
        const double mean = acc.to_double() / static_cast<double>(cfg.full_count(g, rung));
        best = std::max(best, mean);
      }
      out.at(m, i, j) = best;
    }
  });
  return out;
}

// M_q^{<rho} via the identity M_q(g) = (M(|g|^q))^{1/q}: the ladder sup of
// q-power means, then one root. Bitwise equal to maximal() composed with the
// cell transform when ladders match.
inline SpaceTimeField maximal_q_restricted(const SpaceTimeField& f, double q,
                                           std::optional<double> rho = std::nullopt,
                                           CylOrientation orient = CylOrientation::Backward) {
  MaximalConfig cfg = MaximalConfig::make(f.grid(), q, rho, orient);
  SpaceTimeField m = maximal(f, cfg);
  if (q != 1.0) {
    const double inv = 1.0 / q;
    for (double& v : m.values()) v = std::pow(v, inv);
  }
  return m;
}

}  // namespace parab
