#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "parab/whitney.hpp"

namespace parab {

// Discrete bumps: products of 1-D piecewise-cubic plateaus, 1 on the 1/2
// dilation, 0 outside the 3/4 dilation. Plateau membership at the dilation
// edges is decided by integer comparisons, so the value is exactly 1 on
// 1/2 Q_j and exactly 0 on the closed 3/4 boundary.
namespace pdetail {

inline double smooth01(double u) { return u <= 0 ? 0.0 : (u >= 1 ? 1.0 : u * u * (3 - 2 * u)); }
inline double smooth01_d(double u) { return u <= 0 || u >= 1 ? 0.0 : 6 * u * (1 - u); }

// spatial factor: s-profile over |dx| in spatial units against radius r
inline double plateau_x(long long adx, long long r) {
  if (2 * adx <= r) return 1.0;
  if (4 * adx >= 3 * r) return 0.0;
  const double u = (static_cast<double>(adx) / static_cast<double>(r) - 0.5) * 4.0;
  return 1.0 - smooth01(u);
}

// temporal factor and its physical time derivative share u = |dt|/(2 r^2)
inline double plateau_t(long long adt, long long r) {
  const long long r2 = r * r;
  if (2 * adt <= r2) return 1.0;
  if (8 * adt >= 9 * r2) return 0.0;
  const double u = static_cast<double>(adt) / (2.0 * static_cast<double>(r2));
  return 1.0 - smooth01((u - 0.25) / 0.3125);
}

inline double plateau_t_du(long long adt, long long r) {  // d/du of plateau_t
  const long long r2 = r * r;
  if (2 * adt <= r2 || 8 * adt >= 9 * r2) return 0.0;
  const double u = static_cast<double>(adt) / (2.0 * static_cast<double>(r2));
  return -smooth01_d((u - 0.25) / 0.3125) / 0.3125;
}

}  // namespace pdetail

// Per-cube bump sampled over its (clipped) bounding cell box, plus the
// normalization field. rho_dt is the analytic physical time derivative.
struct PartitionOfUnity {
  struct CubeData {
    long long m0, m1, i0, i1, j0, j1;  // half-open cell index box of 3/4 Q_j
    std::vector<double> rho;           // normalized values over the box
    std::vector<double> rho_dt;
    double integral = 0.0;             // sum rho * cellvol

    size_t idx(long long m, long long i, long long j) const {
      return static_cast<size_t>((m - m0) * (i1 - i0) * (j1 - j0) + (i - i0) * (j1 - j0) +
                                 (j - j0));
    }
    bool contains(long long m, long long i, long long j) const {
      return m >= m0 && m < m1 && i >= i0 && i < i1 && j >= j0 && j < j1;
    }
  };

  GridSpec grid;
  std::vector<CubeData> cubes;
  std::vector<double> sum;      // raw bump sum per cell (diagnostic / P3)
  double max_half_deviation = 0.0;  // max |1 - rho_j| over 1/2 Q_j cells
};

inline PartitionOfUnity partition_of_unity(const WhitneyCover& cover) {
  using namespace wdetail;
  using namespace pdetail;
  const GridSpec& g = cover.grid;
  PartitionOfUnity pou;
  pou.grid = g;
  const int ny = g.n == 2 ? g.cells[1] : 1;
  const size_t ncells = static_cast<size_t>(g.steps) * g.cells[0] * ny;
  pou.sum.assign(ncells, 0.0);
  std::vector<double> sum_dt(ncells, 0.0);
  auto cellflat = [&](long long m, long long i, long long j) {
    return (static_cast<size_t>(m) * g.cells[0] + i) * ny + j;
  };

  const double h = g.h(0);
  const double su = h / static_cast<double>(kCellSu);

  // raw bumps
  pou.cubes.resize(cover.cubes.size());
  for (size_t q = 0; q < cover.cubes.size(); ++q) {
    const WhitneyCube& c = cover.cubes[q];
    auto& d = pou.cubes[q];
    const BallBox box = ball_box(g, c.cx, c.ct, (3 * c.r) / 4, /*open=*/false);
    d.m0 = std::max(0ll, box.m0);
    d.m1 = std::min<long long>(g.steps, box.m1);
    d.i0 = std::max(0ll, box.i0);
    d.i1 = std::min<long long>(g.cells[0], box.i1);
    d.j0 = std::max(0ll, box.j0);
    d.j1 = std::min<long long>(ny, box.j1);
    const size_t sz = static_cast<size_t>(std::max(0ll, d.m1 - d.m0)) *
                      std::max(0ll, d.i1 - d.i0) * std::max(0ll, d.j1 - d.j0);
    d.rho.assign(sz, 0.0);
    d.rho_dt.assign(sz, 0.0);
    const double rphys = static_cast<double>(c.r) * su;
    const double r2phys = rphys * rphys;  // temporal half-extent in physical time
    for (long long m = d.m0; m < d.m1; ++m)
      for (long long i = d.i0; i < d.i1; ++i)
        for (long long j = d.j0; j < d.j1; ++j) {
          const long long xs = i * kCellSu + kCellSu / 2;
          const long long ts = m * kCellTu + kCellTu / 2;
          const long long adx = std::llabs(xs - c.cx[0]);
          double v = plateau_x(adx, c.r);
          if (g.n == 2) v *= plateau_x(std::llabs(j * kCellSu + kCellSu / 2 - c.cx[1]), c.r);
          const long long adt = std::llabs(ts - c.ct);
          const double pt = plateau_t(adt, c.r);
          const double pt_du = plateau_t_du(adt, c.r);
          const double sgn = (ts >= c.ct) ? 1.0 : -1.0;
          const double phi = v * pt;
          const double phi_dt = v * pt_du * sgn / r2phys;
          d.rho[d.idx(m, i, j)] = phi;
          d.rho_dt[d.idx(m, i, j)] = phi_dt;
          pou.sum[cellflat(m, i, j)] += phi;
          sum_dt[cellflat(m, i, j)] += phi_dt;
        }
  }

  // renormalize where the raw sum deviates from 1 beyond 1e-12
  for (size_t q = 0; q < pou.cubes.size(); ++q) {
    auto& d = pou.cubes[q];
    const WhitneyCube& c = cover.cubes[q];
    double integral = 0.0;
    for (long long m = d.m0; m < d.m1; ++m)
      for (long long i = d.i0; i < d.i1; ++i)
        for (long long j = d.j0; j < d.j1; ++j) {
          const size_t k = d.idx(m, i, j);
          if (d.rho[k] == 0.0) continue;
          const double S = pou.sum[cellflat(m, i, j)];
          if (std::abs(S - 1.0) > 1e-12) {
            const double Sdt = sum_dt[cellflat(m, i, j)];
            d.rho_dt[k] = (d.rho_dt[k] * S - d.rho[k] * Sdt) / (S * S);
            d.rho[k] /= S;
          }
          integral += d.rho[k];
        }
    d.integral = integral * g.cell_volume();
    // record the (P1) deviation on 1/2 Q_j
    const BallBox half = ball_box(g, c.cx, c.ct, c.r / 2, /*open=*/false);
    for (long long m = std::max(0ll, half.m0); m < std::min<long long>(g.steps, half.m1); ++m)
      for (long long i = std::max(0ll, half.i0); i < std::min<long long>(g.cells[0], half.i1); ++i)
        for (long long j = std::max(0ll, half.j0); j < std::min<long long>(ny, half.j1); ++j)
          pou.max_half_deviation =
              std::max(pou.max_half_deviation, std::abs(1.0 - d.rho[d.idx(m, i, j)]));
  }
  return pou;
}

struct PartitionCheckReport {
  bool p1_support = true;       // rho_j vanishes outside 3/4 Q_j (closed boundary included)
  bool p1_positive_on_half = true;
  bool p1_one_off_overlap = true;  // rho_j == 1 on 1/2 Q_j cells no other support touches
  double p1_max_deviation = 0.0;
  bool p3 = true;               // |sum rho - 1| <= 1e-12 on every 3/4 Q_k cell
  double p3_max_deviation = 0.0;
  double c_pou = 0.0;           // measured (P2) constant, finite-difference sweep
  bool all() const { return p1_support && p1_positive_on_half && p1_one_off_overlap && p3; }
};

inline PartitionCheckReport check_partition(const WhitneyCover& cover,
                                            const PartitionOfUnity& pou) {
  using namespace wdetail;
  const GridSpec& g = cover.grid;
  const int ny = g.n == 2 ? g.cells[1] : 1;
  PartitionCheckReport rep;
  rep.p1_max_deviation = pou.max_half_deviation;
  const double h = g.h(0);
  const double su = h / static_cast<double>(kCellSu);

  // per-cell count of bumps with nonzero value there
  std::vector<int> support_count(pou.sum.size(), 0);
  {
    auto flat = [&](long long m, long long i, long long j) {
      return (static_cast<size_t>(m) * g.cells[0] + i) * ny + j;
    };
    for (const auto& d : pou.cubes)
      for (long long m = d.m0; m < d.m1; ++m)
        for (long long i = d.i0; i < d.i1; ++i)
          for (long long j = d.j0; j < d.j1; ++j)
            if (d.rho[d.idx(m, i, j)] != 0.0) ++support_count[flat(m, i, j)];
  }

  for (size_t q = 0; q < cover.cubes.size(); ++q) {
    const WhitneyCube& c = cover.cubes[q];
    const auto& d = pou.cubes[q];
    const double rphys = static_cast<double>(c.r) * su;
    const double r2phys = rphys * rphys;

    const BallBox half = ball_box(g, c.cx, c.ct, c.r / 2, /*open=*/false);
    for (long long m = std::max(0ll, half.m0); m < std::min<long long>(g.steps, half.m1); ++m)
      for (long long i = std::max(0ll, half.i0); i < std::min<long long>(g.cells[0], half.i1);
           ++i)
        for (long long j = std::max(0ll, half.j0); j < std::min<long long>(ny, half.j1); ++j) {
          const double v = d.rho[d.idx(m, i, j)];
          if (!(v > 0.0)) rep.p1_positive_on_half = false;
          const size_t fl = (static_cast<size_t>(m) * g.cells[0] + i) * ny + j;
          if (support_count[fl] == 1 && v != 1.0) rep.p1_one_off_overlap = false;
        }

    // support: boundary ring of the stored box must be zero whenever the box
    // was not clipped (then the 3/4 ball closure lies inside)
    for (long long m = d.m0; m < d.m1; ++m)
      for (long long i = d.i0; i < d.i1; ++i)
        for (long long j = d.j0; j < d.j1; ++j) {
          const long long xs = i * kCellSu + kCellSu / 2;
          const long long ts = m * kCellTu + kCellTu / 2;
          bool inside = std::llabs(xs - c.cx[0]) * 4 < 3 * c.r;
          if (g.n == 2)
            inside = inside && std::llabs(j * kCellSu + kCellSu / 2 - c.cx[1]) * 4 < 3 * c.r;
          inside = inside && std::llabs(ts - c.ct) * 8 < 9 * c.r * c.r;
          if (!inside && d.rho[d.idx(m, i, j)] != 0.0) rep.p1_support = false;
        }

    // (P2) finite-difference sweep over the stored box
    double rr = 0.0;
    auto val = [&](long long m, long long i, long long j) -> double {
      return d.contains(m, i, j) ? d.rho[d.idx(m, i, j)] : 0.0;
    };
    for (long long m = d.m0; m < d.m1; ++m)
      for (long long i = d.i0; i < d.i1; ++i)
        for (long long j = d.j0; j < d.j1; ++j) {
          const double v = val(m, i, j);
          double grad = 0.0, hess = 0.0;
          const double gx = (val(m, i + 1, j) - val(m, i - 1, j)) / (2 * h);
          grad += gx * gx;
          hess += std::pow((val(m, i + 1, j) - 2 * v + val(m, i - 1, j)) / (h * h), 2);
          if (g.n == 2) {
            const double gy = (val(m, i, j + 1) - val(m, i, j - 1)) / (2 * h);
            grad += gy * gy;
            hess += std::pow((val(m, i, j + 1) - 2 * v + val(m, i, j - 1)) / (h * h), 2);
          }
          const double dt = (val(m + 1, i, j) - val(m - 1, i, j)) / (2 * g.tau());
          const double combo = std::abs(v) + rphys * std::sqrt(grad) + r2phys * std::sqrt(hess) +
                               r2phys * std::abs(dt);
          rr = std::max(rr, combo);
        }
    rep.c_pou = std::max(rep.c_pou, rr);
  }

  // (P3) on all 3/4 boxes: normalized sums
  std::vector<double> snorm(pou.sum.size(), 0.0);
  auto cellflat = [&](long long m, long long i, long long j) {
    return (static_cast<size_t>(m) * g.cells[0] + i) * ny + j;
  };
  for (const auto& d : pou.cubes)
    for (long long m = d.m0; m < d.m1; ++m)
      for (long long i = d.i0; i < d.i1; ++i)
        for (long long j = d.j0; j < d.j1; ++j)
          snorm[cellflat(m, i, j)] += d.rho[d.idx(m, i, j)];
  for (size_t q = 0; q < cover.cubes.size(); ++q) {
    const auto& d = pou.cubes[q];
    for (long long m = d.m0; m < d.m1; ++m)
      for (long long i = d.i0; i < d.i1; ++i)
        for (long long j = d.j0; j < d.j1; ++j) {
          // (P3) is stated on 3/4 Q_k; the stored box is exactly that set
          const double dev = std::abs(snorm[cellflat(m, i, j)] - 1.0);
          rep.p3_max_deviation = std::max(rep.p3_max_deviation, dev);
          if (dev > 1e-12) rep.p3 = false;
        }
  }
  return rep;
}

}  // namespace parab
