#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "parab/field.hpp"
#include "parab/grid.hpp"

namespace parab {

// Bad set O_lambda = {M(grad w) > lambda} u {M(G) > lambda} as a cell mask.
struct BadSet {
  GridSpec grid;
  double lambda = 0.0;
  std::vector<uint8_t> mask;  // 1 = bad, cell-major (t, x, y)

  long long count() const {
    long long c = 0;
    for (auto v : mask) c += v;
    return c;
  }
  double measure() const { return static_cast<double>(count()) * grid.cell_volume(); }
  size_t cell(int m, int i, int j) const {
    const int ny = grid.n == 2 ? grid.cells[1] : 1;
    return (static_cast<size_t>(m) * grid.cells[0] + i) * ny + j;
  }
};

inline BadSet bad_set(const SpaceTimeField& mgrad, const SpaceTimeField& mG, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("bad_set: lambda must be positive");
  if (!mgrad.grid().same_layout(mG.grid())) throw std::invalid_argument("bad_set: grids differ");
  BadSet b;
  b.grid = mgrad.grid();
  b.lambda = lambda;
  b.mask.resize(mgrad.values().size());
  for (size_t k = 0; k < b.mask.size(); ++k)
    b.mask[k] = (mgrad.values()[k] > lambda || mG.values()[k] > lambda) ? 1 : 0;
  return b;
}

// ---------------------------------------------------------------------------
// Whitney covering machinery.
//
// Geometry lives in scaled integer units: spatial unit h/2^K, temporal unit
// tau/4^K with K = 8. A parabolic cube of radius r (in spatial units) is the
// sup-metric ball |dx| <= r, |dt| <= 2 r^2 (the factor 2 encodes tau = h^2/2,
// which is a precondition: it makes the dyadic parabolic tree cell-aligned).
// Dyadic tiles at level ell have radius 2^(ell+K-1); levels down to -5 give
// sub-cell tiles so thin bad sets are still covered. All containment and
// distance predicates below are integer comparisons.
// ---------------------------------------------------------------------------

constexpr int kWhitneyScaleBits = 8;          // K
constexpr long long kCellSu = 1ll << kWhitneyScaleBits;       // 256
constexpr long long kCellTu = 1ll << (2 * kWhitneyScaleBits); // 65536
constexpr int kWhitneyMinLevel = -5;

struct WhitneyCube {
  int level;                     // tile level
  long long r_tile;              // tile radius, spatial units
  long long r;                   // output cube radius (2 or 4 x r_tile)
  std::array<long long, 2> cx;   // center, spatial units
  long long ct;                  // center, temporal units
  std::array<long long, 3> anchor;  // tile anchor indices (ix, iy, it)

  double radius_phys(const GridSpec& g) const {
    return static_cast<double>(r) * g.h(0) / static_cast<double>(kCellSu);
  }
};

struct WhitneyCover {
  GridSpec grid;
  std::vector<WhitneyCube> cubes;
  std::vector<std::vector<int>> neighbors;  // A_k (includes k itself)
  int k_overlap = 0;                        // recorded max of (W5) and (W8)
  bool coverage_failure = false;
};

namespace wdetail {

inline long long floordiv(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
inline long long ceildiv(long long a, long long b) { return -floordiv(-a, b); }

// int64 prefix counts of good (complement) and bad cells
struct MaskPrefix {
  int nt, nx, ny;
  std::vector<long long> good, bad;

  explicit MaskPrefix(const BadSet& b) {
    const GridSpec& g = b.grid;
    nt = g.steps;
    nx = g.cells[0];
    ny = g.n == 2 ? g.cells[1] : 1;
    const size_t sz = static_cast<size_t>(nt + 1) * (nx + 1) * (ny + 1);
    good.assign(sz, 0);
    bad.assign(sz, 0);
    for (int m = 1; m <= nt; ++m)
      for (int i = 1; i <= nx; ++i)
        for (int j = 1; j <= ny; ++j) {
          const bool isbad = b.mask[b.cell(m - 1, i - 1, j - 1)] != 0;
          for (auto* arr : {&good, &bad}) {
            auto& P = *arr;
            const bool target = (arr == &bad) ? isbad : !isbad;
            P[at(m, i, j)] = (target ? 1 : 0) + P[at(m - 1, i, j)] + P[at(m, i - 1, j)] +
                             P[at(m, i, j - 1)] - P[at(m - 1, i - 1, j)] -
                             P[at(m - 1, i, j - 1)] - P[at(m, i - 1, j - 1)] +
                             P[at(m - 1, i - 1, j - 1)];
          }
        }
  }

  size_t at(int m, int i, int j) const {
    return (static_cast<size_t>(m) * (nx + 1) + i) * (ny + 1) + j;
  }

  long long range(const std::vector<long long>& P, long long m0, long long m1, long long i0,
                  long long i1, long long j0, long long j1) const {
    m0 = std::max(0ll, m0); i0 = std::max(0ll, i0); j0 = std::max(0ll, j0);
    m1 = std::min<long long>(nt, m1); i1 = std::min<long long>(nx, i1);
    j1 = std::min<long long>(ny, j1);
    if (m0 >= m1 || i0 >= i1 || j0 >= j1) return 0;
    auto f = [&](long long m, long long i, long long j) {
      return P[at(static_cast<int>(m), static_cast<int>(i), static_cast<int>(j))];
    };
    return f(m1, i1, j1) - f(m0, i1, j1) - f(m1, i0, j1) - f(m1, i1, j0) + f(m0, i0, j1) +
           f(m0, i1, j0) + f(m1, i0, j0) - f(m0, i0, j0);
  }
};

// index ranges of cell centers inside ball intervals
struct BallBox {
  long long i0, i1, j0, j1, m0, m1;  // half-open index ranges
  bool exterior;                     // ball reaches outside the array
};

inline BallBox ball_box(const GridSpec& g, std::array<long long, 2> c, long long ct,
                        long long rho, bool open) {
  BallBox b{};
  const long long dt = 2 * rho * rho;
  const int ny = g.n == 2 ? g.cells[1] : 1;
  auto lo_idx = [&](long long center, long long reach) {
    // centers u*kCellSu + kCellSu/2 >(=) center - reach
    const long long bound = center - reach - kCellSu / 2;
    return open ? floordiv(bound, kCellSu) + 1 : ceildiv(bound, kCellSu);
  };
  auto hi_idx = [&](long long center, long long reach) {  // exclusive
    const long long bound = center + reach - kCellSu / 2;
    return open ? ceildiv(bound, kCellSu) : floordiv(bound, kCellSu) + 1;
  };
  auto lo_t = [&](long long center, long long reach) {
    const long long bound = center - reach - kCellTu / 2;
    return open ? floordiv(bound, kCellTu) + 1 : ceildiv(bound, kCellTu);
  };
  auto hi_t = [&](long long center, long long reach) {
    const long long bound = center + reach - kCellTu / 2;
    return open ? ceildiv(bound, kCellTu) : floordiv(bound, kCellTu) + 1;
  };
  b.i0 = lo_idx(c[0], rho);
  b.i1 = hi_idx(c[0], rho);
  if (g.n == 2) {
    b.j0 = lo_idx(c[1], rho);
    b.j1 = hi_idx(c[1], rho);
  } else {
    b.j0 = 0;
    b.j1 = 1;
  }
  b.m0 = lo_t(ct, dt);
  b.m1 = hi_t(ct, dt);
  const long long sx = static_cast<long long>(g.cells[0]) * kCellSu;
  const long long sy = static_cast<long long>(ny) * kCellSu;
  const long long st = static_cast<long long>(g.steps) * kCellTu;
  auto outside = [&](long long center, long long reach, long long hi) {
    return open ? (center - reach < 0 || center + reach > hi)
                : (center - reach < 0 || center + reach > hi);
  };
  b.exterior = outside(c[0], rho, sx) || (g.n == 2 && outside(c[1], rho, sy)) ||
               outside(ct, dt, st);
  return b;
}

// any complement (good cell center or exterior) strictly within distance rho?
inline bool complement_in_open_ball(const GridSpec& g, const MaskPrefix& pref,
                                    std::array<long long, 2> c, long long ct, long long rho) {
  const BallBox b = ball_box(g, c, ct, rho, /*open=*/true);
  if (b.exterior) return true;
  return pref.range(pref.good, b.m0, b.m1, b.i0, b.i1, b.j0, b.j1) > 0;
}

inline bool complement_in_closed_ball(const GridSpec& g, const MaskPrefix& pref,
                                      std::array<long long, 2> c, long long ct, long long rho) {
  const BallBox b = ball_box(g, c, ct, rho, /*open=*/false);
  if (b.exterior) return true;
  return pref.range(pref.good, b.m0, b.m1, b.i0, b.i1, b.j0, b.j1) > 0;
}

inline long long bad_in_closed_ball(const GridSpec& g, const MaskPrefix& pref,
                                    std::array<long long, 2> c, long long ct, long long rho) {
  const BallBox b = ball_box(g, c, ct, rho, /*open=*/false);
  return pref.range(pref.bad, b.m0, b.m1, b.i0, b.i1, b.j0, b.j1);
}

inline void require_parabolic_grid(const GridSpec& g) {
  const double h = g.h(0);
  if (g.n == 2 && std::abs(g.h(1) - h) > 1e-12 * h)
    throw std::invalid_argument("whitney: anisotropic spatial steps");
  if (std::abs(g.tau() - h * h / 2.0) > 1e-12 * g.tau())
    throw std::invalid_argument("whitney: requires tau == h^2/2");
}

}  // namespace wdetail

// Dyadic parabolic Whitney covering of the bad set. Maximal dyadic tiles T
// whose center keeps parabolic distance >= 17 r_T from the complement are
// selected; the emitted cube is 2T (4T when the center distance exceeds
// 32 r_T), which realizes (W1), (W2) and (W4) exactly on the grid.
inline WhitneyCover whitney_cover(const BadSet& bad) {
  using namespace wdetail;
  const GridSpec& g = bad.grid;
  require_parabolic_grid(g);
  WhitneyCover cover;
  cover.grid = g;
  if (bad.count() == 0) return cover;

  MaskPrefix pref(bad);

  int ltop = 6;
  auto divides = [&](int ell) {
    if (ell < 0) return true;
    if (g.cells[0] % (1ll << ell)) return false;
    if (g.n == 2 && g.cells[1] % (1ll << ell)) return false;
    if (g.steps % (1ll << (2 * ell))) return false;
    return true;
  };
  while (ltop > 0 && !divides(ltop)) --ltop;

  struct Frame {
    int level;
    long long ix, iy, it;
  };
  std::vector<Frame> stack;
  const long long tx = g.cells[0] >> ltop;
  const long long ty = g.n == 2 ? (g.cells[1] >> ltop) : 1;
  const long long tt = g.steps >> (2 * ltop);
  for (long long it = 0; it < tt; ++it)
    for (long long ix = 0; ix < tx; ++ix)
      for (long long iy = 0; iy < ty; ++iy) stack.push_back({ltop, ix, iy, it});

  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const long long side = 1ll << (f.level + kWhitneyScaleBits);       // spatial, su
    const long long ext = 1ll << (2 * (f.level + kWhitneyScaleBits));  // temporal, tu
    const long long r_tile = side / 2;
    const std::array<long long, 2> c{f.ix * side + r_tile, g.n == 2 ? f.iy * side + r_tile : 0};
    const long long ct = f.it * ext + ext / 2;

    // prune tiles holding no bad cell center
    {
      const long long i0 = ceildiv(f.ix * side - kCellSu / 2, kCellSu);
      const long long i1 = floordiv((f.ix + 1) * side - 1 - kCellSu / 2, kCellSu) + 1;
      const long long j0 = g.n == 2 ? ceildiv(f.iy * side - kCellSu / 2, kCellSu) : 0;
      const long long j1 =
          g.n == 2 ? floordiv((f.iy + 1) * side - 1 - kCellSu / 2, kCellSu) + 1 : 1;
      const long long m0 = ceildiv(f.it * ext - kCellTu / 2, kCellTu);
      const long long m1 = floordiv((f.it + 1) * ext - 1 - kCellTu / 2, kCellTu) + 1;
      if (pref.range(pref.bad, m0, m1, i0, i1, j0, j1) == 0) continue;
    }

    if (!complement_in_open_ball(g, pref, c, ct, 17 * r_tile)) {
      WhitneyCube q;
      q.level = f.level;
      q.r_tile = r_tile;
      q.r = complement_in_closed_ball(g, pref, c, ct, 32 * r_tile) ? 2 * r_tile : 4 * r_tile;
      q.cx = c;
      q.ct = ct;
      q.anchor = {f.ix, f.iy, f.it};
      cover.cubes.push_back(q);
      continue;
    }
    if (f.level == kWhitneyMinLevel) {
      cover.coverage_failure = true;
      continue;
    }
    for (int dt = 0; dt < 4; ++dt)
      for (int dx = 0; dx < 2; ++dx) {
        if (g.n == 2) {
          for (int dy = 0; dy < 2; ++dy)
            stack.push_back({f.level - 1, 2 * f.ix + dx, 2 * f.iy + dy, 4 * f.it + dt});
        } else {
          stack.push_back({f.level - 1, 2 * f.ix + dx, 0, 4 * f.it + dt});
        }
      }
  }

  std::sort(cover.cubes.begin(), cover.cubes.end(), [](const WhitneyCube& a, const WhitneyCube& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.anchor[2] != b.anchor[2]) return a.anchor[2] < b.anchor[2];
    if (a.anchor[0] != b.anchor[0]) return a.anchor[0] < b.anchor[0];
    return a.anchor[1] < b.anchor[1];
  });
  return cover;
}

namespace wdetail {

// open overlap of the alpha-dilations (num/den) of two cubes
inline bool dilated_open_overlap(const GridSpec& g, const WhitneyCube& a, const WhitneyCube& b,
                                 long long num, long long den) {
  // radii num*r/den must stay integral: r is a multiple of 4 and num/den is
  // quarter-based, so multiply through by den instead of dividing
  const long long ra = num * a.r, rb = num * b.r;  // scaled by den
  for (int ax = 0; ax < g.n; ++ax)
    if (std::llabs(a.cx[ax] - b.cx[ax]) * den >= ra + rb) return false;
  // temporal half-extents 2 (num r / den)^2, compare scaled by den^2
  const long long ta = 2 * ra * ra, tb = 2 * rb * rb;
  if (std::llabs(a.ct - b.ct) * den * den >= ta + tb) return false;
  return true;
}

inline bool closed_cube_overlap(const GridSpec& g, const WhitneyCube& a, const WhitneyCube& b) {
  for (int ax = 0; ax < g.n; ++ax)
    if (std::llabs(a.cx[ax] - b.cx[ax]) > a.r + b.r) return false;
  return std::llabs(a.ct - b.ct) <= 2 * a.r * a.r + 2 * b.r * b.r;
}

}  // namespace wdetail

// A_k = { j : 3/4 Q_k and 3/4 Q_j overlap with positive volume }, bucketed by
// tile anchors so construction is near-linear in the cube count.
inline std::vector<std::vector<int>> neighbor_sets(WhitneyCover& cover) {
  using namespace wdetail;
  const GridSpec& g = cover.grid;
  const int J = static_cast<int>(cover.cubes.size());
  std::unordered_map<long long, std::unordered_map<uint64_t, int>> byLevel;
  auto key = [](long long ix, long long iy, long long it) {
    return (static_cast<uint64_t>(ix & 0xFFFFF)) | (static_cast<uint64_t>(iy & 0xFFFFF) << 20) |
           (static_cast<uint64_t>(it & 0xFFFFF) << 40);
  };
  for (int j = 0; j < J; ++j) {
    const auto& q = cover.cubes[j];
    byLevel[q.level][key(q.anchor[0], q.anchor[1], q.anchor[2])] = j;
  }
  std::vector<std::vector<int>> A(J);
  for (int k = 0; k < J; ++k) {
    const auto& qk = cover.cubes[k];
    for (int ell = std::max(qk.level - 3, kWhitneyMinLevel); ell <= qk.level + 3; ++ell) {
      auto it = byLevel.find(ell);
      if (it == byLevel.end()) continue;
      const long long side = 1ll << (ell + kWhitneyScaleBits);
      const long long ext = 1ll << (2 * (ell + kWhitneyScaleBits));
      const long long rmaxn = 4ll << (ell + kWhitneyScaleBits - 1);  // largest output radius
      // search window: centers within 3/4 (r_k + r_j) spatially and the
      // corresponding temporal reach
      const long long reach = (3 * (qk.r + rmaxn)) / 4 + side;
      const long long treach =
          (3 * qk.r * 3 * qk.r * 2) / 16 + (3 * rmaxn * 3 * rmaxn * 2) / 16 + ext;
      const long long ix0 = floordiv(qk.cx[0] - reach, side), ix1 = floordiv(qk.cx[0] + reach, side);
      const long long iy0 = g.n == 2 ? floordiv(qk.cx[1] - reach, side) : 0;
      const long long iy1 = g.n == 2 ? floordiv(qk.cx[1] + reach, side) : 0;
      const long long it0 = floordiv(qk.ct - treach, ext), it1 = floordiv(qk.ct + treach, ext);
      for (long long tix = ix0; tix <= ix1; ++tix)
        for (long long tiy = iy0; tiy <= iy1; ++tiy)
          for (long long tit = it0; tit <= it1; ++tit) {
            auto hit = it->second.find(key(tix, tiy, tit));
            if (hit == it->second.end()) continue;
            const int j = hit->second;
            if (dilated_open_overlap(g, qk, cover.cubes[j], 3, 4)) A[k].push_back(j);
          }
    }
    std::sort(A[k].begin(), A[k].end());
    A[k].erase(std::unique(A[k].begin(), A[k].end()), A[k].end());
  }
  cover.neighbors = A;
  return A;
}

// O(J^2) reference for tests
inline std::vector<std::vector<int>> neighbor_sets_oracle(const WhitneyCover& cover) {
  const int J = static_cast<int>(cover.cubes.size());
  std::vector<std::vector<int>> A(J);
  for (int k = 0; k < J; ++k)
    for (int j = 0; j < J; ++j)
      if (wdetail::dilated_open_overlap(cover.grid, cover.cubes[k], cover.cubes[j], 3, 4))
        A[k].push_back(j);
  return A;
}

struct WhitneyCheckReport {
  bool w1 = false, w2 = false, w3 = false, w4 = false, w6 = false, w7 = false;
  int k_overlap = 0;        // max of the (W5) overlap field and (W8) #A_k
  long long cube_count = 0;
  std::string detail;

  bool all() const { return w1 && w2 && w3 && w4 && w6 && w7; }
};

// Exhaustive integer-exact checker for (W1)-(W8). Disjointness and the (W7)
// radius bound are checked in their measure-theoretic form (open overlap,
// closed ratio-2 bound): the dyadic construction attains ratio exactly 2.
inline WhitneyCheckReport check_cover(WhitneyCover& cover, const BadSet& bad) {
  using namespace wdetail;
  const GridSpec& g = cover.grid;
  MaskPrefix pref(bad);
  WhitneyCheckReport rep;
  rep.cube_count = static_cast<long long>(cover.cubes.size());
  const int ny = g.n == 2 ? g.cells[1] : 1;

  // (W1) union of 1/2 Q_j equals the bad set on cell centers
  std::vector<uint8_t> covered(bad.mask.size(), 0);
  bool halves_bad = true;
  for (const auto& q : cover.cubes) {
    const BallBox b = ball_box(g, q.cx, q.ct, q.r / 2, /*open=*/false);
    for (long long m = std::max(0ll, b.m0); m < std::min<long long>(g.steps, b.m1); ++m)
      for (long long i = std::max(0ll, b.i0); i < std::min<long long>(g.cells[0], b.i1); ++i)
        for (long long j = std::max(0ll, b.j0); j < std::min<long long>(ny, b.j1); ++j) {
          const size_t idx = bad.cell(static_cast<int>(m), static_cast<int>(i), static_cast<int>(j));
          covered[idx] = 1;
          if (!bad.mask[idx]) halves_bad = false;
        }
    if (b.exterior) halves_bad = false;  // half-cube must stay inside the bad set
  }
  rep.w1 = halves_bad && covered == bad.mask;

  // (W2) 8Q_j inside the bad set, 16Q_j meets the complement
  rep.w2 = true;
  for (const auto& q : cover.cubes) {
    if (complement_in_closed_ball(g, pref, q.cx, q.ct, 8 * q.r)) rep.w2 = false;
    if (!complement_in_closed_ball(g, pref, q.cx, q.ct, 16 * q.r)) rep.w2 = false;
  }

  if (cover.neighbors.empty()) neighbor_sets(cover);

  // (W3)/(W7) radius comparability and (W4) quarter-cube disjointness over
  // all pairs (exhaustive; candidate lists could miss touching-only pairs)
  rep.w3 = true;
  rep.w4 = true;
  rep.w7 = true;
  const int J = static_cast<int>(cover.cubes.size());
  for (int k = 0; k < J; ++k)
    for (int j = k + 1; j < J; ++j) {
      const auto &a = cover.cubes[k], &b = cover.cubes[j];
      const bool comparable = 2 * a.r >= b.r && a.r <= 2 * b.r;
      if (closed_cube_overlap(g, a, b) && !comparable) rep.w3 = false;
      if (dilated_open_overlap(g, a, b, 1, 4)) rep.w4 = false;
      if (dilated_open_overlap(g, a, b, 3, 4) && !comparable) rep.w7 = false;
    }

  // (W5)/(W8): overlap bound of 4Q_j and #A_k, recorded
  {
    std::vector<int> overlap(bad.mask.size(), 0);
    for (const auto& q : cover.cubes) {
      const BallBox b = ball_box(g, q.cx, q.ct, 4 * q.r, /*open=*/false);
      for (long long m = std::max(0ll, b.m0); m < std::min<long long>(g.steps, b.m1); ++m)
        for (long long i = std::max(0ll, b.i0); i < std::min<long long>(g.cells[0], b.i1); ++i)
          for (long long j = std::max(0ll, b.j0); j < std::min<long long>(ny, b.j1); ++j)
            ++overlap[bad.cell(static_cast<int>(m), static_cast<int>(i), static_cast<int>(j))];
    }
    int mx = 0;
    for (int v : overlap) mx = std::max(mx, v);
    for (int k = 0; k < J; ++k) mx = std::max(mx, static_cast<int>(cover.neighbors[k].size()));
    rep.k_overlap = mx;
    cover.k_overlap = mx;
  }

  // (W6) |3/4 Q_j ^ 3/4 Q_k| >= 32^{-n-2} max(|Q_j|, |Q_k|), integer-exact:
  // all lengths are quarter-integers, so compare scaled by 4^{n+2} * 32^{n+2}
  rep.w6 = true;
  for (int k = 0; k < J; ++k)
    for (int j : cover.neighbors[k]) {
      if (j == k) continue;
      const auto &a = cover.cubes[k], &b = cover.cubes[j];
      __int128 inter = 1;
      bool empty = false;
      for (int ax = 0; ax < g.n; ++ax) {
        const long long lo = std::max(4 * a.cx[ax] - 3 * a.r, 4 * b.cx[ax] - 3 * b.r);
        const long long hi = std::min(4 * a.cx[ax] + 3 * a.r, 4 * b.cx[ax] + 3 * b.r);
        if (hi <= lo) empty = true;
        inter *= static_cast<__int128>(hi - lo);  // scaled by 4
      }
      {
        const long long lo =
            std::max(16 * a.ct - 2 * 9 * a.r * a.r, 16 * b.ct - 2 * 9 * b.r * b.r);
        const long long hi =
            std::min(16 * a.ct + 2 * 9 * a.r * a.r, 16 * b.ct + 2 * 9 * b.r * b.r);
        if (hi <= lo) empty = true;
        inter *= static_cast<__int128>(hi - lo);  // scaled by 16
      }
      if (empty) {
        rep.w6 = false;
        continue;
      }
      auto vol = [&](const WhitneyCube& q) {
        __int128 v = 1;
        for (int ax = 0; ax < g.n; ++ax) v *= static_cast<__int128>(2 * q.r) * 4;
        v *= static_cast<__int128>(4 * q.r * q.r) * 16;
        return v;
      };
      const __int128 mx = std::max(vol(a), vol(b));
      __int128 lhs = inter;
      for (int e = 0; e < g.n + 2; ++e) lhs *= 32;
      if (lhs < mx) rep.w6 = false;
    }

  return rep;
}

}  // namespace parab
