#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "parab/exact_sum.hpp"
#include "parab/extension.hpp"
#include "parab/maximal.hpp"
#include "parab/norms.hpp"
#include "parab/partition.hpp"
#include "parab/rng.hpp"
#include "parab/solver.hpp"
#include "parab/whitney.hpp"

namespace parab {

// Mean value <w>_{rho_j}: the rho_j-weighted average of w over the cube's
// support, zeroed when 3/4 Q_j is not contained in (0,2T) x Omega.
inline std::vector<double> weighted_mean(const SpaceTimeField& w_ext, const Extension& ext,
                                         const WhitneyCube& cube,
                                         const PartitionOfUnity::CubeData& bump) {
  const GridSpec& g = w_ext.grid();
  const int N = g.ncomp;
  std::vector<double> mean(N, 0.0);
  // integer containment test of 3/4 Q_j in the doubled-time open domain
  const long long r34 = (3 * cube.r) / 4;
  const long long t34 = 2 * ((3 * cube.r) / 4) * ((3 * cube.r) / 4);
  bool inside = true;
  {
    const long long xlo = static_cast<long long>(ext.space_offset[0]) * kCellSu;
    const long long xhi = xlo + static_cast<long long>(ext.original.cells[0]) * kCellSu;
    if (cube.cx[0] - r34 <= xlo || cube.cx[0] + r34 >= xhi) inside = false;
    if (g.n == 2) {
      const long long ylo = static_cast<long long>(ext.space_offset[1]) * kCellSu;
      const long long yhi = ylo + static_cast<long long>(ext.original.cells[1]) * kCellSu;
      if (cube.cx[1] - r34 <= ylo || cube.cx[1] + r34 >= yhi) inside = false;
    }
    const long long tlo = static_cast<long long>(ext.time_offset) * kCellTu;
    const long long thi = tlo + 2ll * ext.original.steps * kCellTu;
    if (cube.ct - t34 <= tlo || cube.ct + t34 >= thi) inside = false;
  }
  if (!inside) return mean;

  ExactAcc denom;
  std::vector<ExactAcc> num(N);
  for (long long m = bump.m0; m < bump.m1; ++m)
    for (long long i = bump.i0; i < bump.i1; ++i)
      for (long long j = bump.j0; j < bump.j1; ++j) {
        const double r = bump.rho[bump.idx(m, i, j)];
        if (r == 0.0) continue;
        denom.add(r);
        for (int c = 0; c < N; ++c)
          num[c].add(r * w_ext.at(static_cast<int>(m), static_cast<int>(i),
                                  static_cast<int>(j), c));
      }
  const double d = denom.to_double();
  if (!(d > 0.0)) throw std::runtime_error("weighted_mean: empty bump");
  for (int c = 0; c < N; ++c) mean[c] = num[c].to_double() / d;
  return mean;
}

struct TruncationMeasures {
  double l2_lhs = 0, l2_rhs = 0;       // grad stability, exponent q
  double l3_max_over_lambda = 0;       // max M(grad w_lambda) / lambda
  double l4_max_over_lambda = 0;       // parabolic difference quotients / lambda
  double grad_inf = 0;                 // ||grad w_lambda||_inf (extended)
  double l6_lhs = 0, l6_rhs = 0;       // time-derivative pairing, exponent q
  double l7_lhs = 0, l7_rhs = 0;       // weighted grad stability
  double l8_lhs = 0, l8_rhs = 0;       // weighted time pairing vs sqrt bound
  double lp_lhs = 0, lp_rhs = 0;       // ||w_lambda||_p vs ||w||_p over (0,2T)
  double poincare_max = 0;             // pointwise Poincare ratio
  double mean_diff_max_over_lambda = 0;  // sum_{j in A_k} |w_j - w_k|/r_j / lambda
};

struct TruncationResult {
  Extension ext;
  double lambda = 0;
  double q = 2.0;
  SpaceTimeField w_ext, G_ext, w_lambda, dt_wlambda;
  SpaceTimeField mgrad, mG;     // maximal fields on the extended grid
  BadSet bad;
  WhitneyCover cover;
  PartitionOfUnity pou;
  std::vector<std::vector<double>> means;
  std::vector<uint8_t> changed;  // cells with w_lambda != w (extended grid)
  double input_residual = 0;
  TruncationMeasures meas;

  long long changed_count() const {
    long long c = 0;
    for (auto v : changed) c += v;
    return c;
  }
  double changed_measure() const {
    return static_cast<double>(changed_count()) * ext.extended.cell_volume();
  }
};

namespace ltdetail {

inline double pow_q(double v, double q) { return q == 1.0 ? v : std::pow(v, q); }

// |grad w_lambda| via the Dirichlet-aware extended gradient
inline SpaceTimeField wl_gradient_mag(const SpaceTimeField& wl, const Extension& ext) {
  return magnitude_field(extended_gradient(wl, ext));
}

}  // namespace ltdetail

// Context shared across a lambda ladder: the extension and the maximal
// fields depend only on the pair, so sweeps build them once.
struct TruncationContext {
  Extension ext;
  SpaceTimeField w_ext, G_ext;
  SpaceTimeField gradmag, Gmag;  // |grad w| and |G| on the extended grid
  SpaceTimeField mgrad, mG;
  double input_residual = 0.0;
  double max_maximal = 0.0;
};

inline TruncationContext make_truncation_context(const SpaceTimeField& w,
                                                 const SpaceTimeField& G) {
  TruncationContext ctx;
  ctx.input_residual = pair_weak_residual(w, G);
  ExtendedPair ep = extend_spacetime(w, G);
  ctx.ext = ep.ext;
  ctx.w_ext = std::move(ep.w);
  ctx.G_ext = std::move(ep.G);
  ctx.gradmag = magnitude_field(extended_gradient(ctx.w_ext, ctx.ext));
  ctx.Gmag = magnitude_field(ctx.G_ext);
  const MaximalConfig mcfg = MaximalConfig::make(ctx.ext.extended);
  ctx.mgrad = maximal(ctx.gradmag, mcfg);
  ctx.mG = maximal(ctx.Gmag, mcfg);
  ctx.max_maximal = std::max(lp_norm(ctx.mgrad, kInfExponent), lp_norm(ctx.mG, kInfExponent));
  return ctx;
}

// The parabolic Lipschitz truncation w -> w_lambda at one level, from a
// prebuilt context. The input pair must fulfil the discrete divergence
// identity up to `gate` in the tent metric (pass the producing solver's
// measured residual scaled by 10).
inline TruncationResult truncate(const TruncationContext& ctx, double lambda,
                                 const SpaceTimeField* omega = nullptr, double gate = 1e300,
                                 double q = 2.0) {
  if (!(lambda > 0.0)) throw std::invalid_argument("truncate: lambda must be positive");
  TruncationResult R;
  R.lambda = lambda;
  R.q = q;
  R.input_residual = ctx.input_residual;
  if (!(R.input_residual <= gate))
    throw std::invalid_argument("truncate: divergence identity residual " +
                                std::to_string(R.input_residual) + " above gate " +
                                std::to_string(gate));

  R.ext = ctx.ext;
  R.w_ext = ctx.w_ext;
  R.G_ext = ctx.G_ext;
  const GridSpec& gx = R.ext.extended;
  const int N = gx.ncomp;
  const int ny = gx.n == 2 ? gx.cells[1] : 1;

  const SpaceTimeField& gradmag = ctx.gradmag;
  const SpaceTimeField& Gmag = ctx.Gmag;
  const MaximalConfig mcfg = MaximalConfig::make(gx);
  R.mgrad = ctx.mgrad;
  R.mG = ctx.mG;
  R.bad = bad_set(R.mgrad, R.mG, lambda);

  R.w_lambda = R.w_ext;
  R.dt_wlambda = SpaceTimeField(gx, Rank::Vector);
  R.changed.assign(R.bad.mask.size(), 0);

  if (R.bad.count() > 0) {
    R.cover = whitney_cover(R.bad);
    neighbor_sets(R.cover);
    R.pou = partition_of_unity(R.cover);
    R.means.resize(R.cover.cubes.size());
    for (size_t k = 0; k < R.cover.cubes.size(); ++k)
      R.means[k] = weighted_mean(R.w_ext, R.ext, R.cover.cubes[k], R.pou.cubes[k]);

    // w_lambda = w - sum_j rho_j (w - w_j); supports live inside the bad set
    std::vector<double> S(R.bad.mask.size(), 0.0);
    std::vector<double> SW(R.bad.mask.size() * N, 0.0);
    std::vector<double> SDW(R.bad.mask.size() * N, 0.0);
    auto flat = [&](long long m, long long i, long long j) {
      return (static_cast<size_t>(m) * gx.cells[0] + i) * ny + j;
    };
    for (size_t k = 0; k < R.cover.cubes.size(); ++k) {
      const auto& d = R.pou.cubes[k];
      for (long long m = d.m0; m < d.m1; ++m)
        for (long long i = d.i0; i < d.i1; ++i)
          for (long long j = d.j0; j < d.j1; ++j) {
            const double r = d.rho[d.idx(m, i, j)];
            const double rdt = d.rho_dt[d.idx(m, i, j)];
            if (r == 0.0 && rdt == 0.0) continue;
            const size_t fl = flat(m, i, j);
            S[fl] += r;
            for (int c = 0; c < N; ++c) {
              SW[fl * N + c] += r * R.means[k][c];
              SDW[fl * N + c] += rdt * R.means[k][c];
            }
          }
    }
    for (int m = 0; m < gx.steps; ++m)
      for (int i = 0; i < gx.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          const size_t fl = flat(m, i, j);
          if (S[fl] == 0.0) continue;  // untouched: w_lambda = w bitwise
          bool moved = false;
          for (int c = 0; c < N; ++c) {
            const double wv = R.w_ext.at(m, i, j, c);
            const double nv = wv * (1.0 - S[fl]) + SW[fl * N + c];
            if (nv != wv) moved = true;
            R.w_lambda.at(m, i, j, c) = nv;
            R.dt_wlambda.at(m, i, j, c) = SDW[fl * N + c];
          }
          if (moved) R.changed[fl] = 1;
        }
  }

  // ---- measured properties -------------------------------------------
  TruncationMeasures& M = R.meas;
  const double vol = gx.cell_volume();

  // (L2): grad(w - w_lambda) in L^q vs the bad-set energy
  {
    SpaceTimeField diff = R.w_ext;
    diff -= R.w_lambda;
    SpaceTimeField gd = magnitude_field(extended_gradient(diff, R.ext));
    ExactAcc lhs, rhs;
    for (int m = 0; m < gx.steps; ++m)
      for (int i = 0; i < gx.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          lhs.add(ltdetail::pow_q(gd.at(m, i, j), q));
          if (R.bad.mask[R.bad.cell(m, i, j)])
            rhs.add(ltdetail::pow_q(gradmag.at(m, i, j), q) +
                    ltdetail::pow_q(Gmag.at(m, i, j), q));
        }
    M.l2_lhs = lhs.to_double() * vol;
    M.l2_rhs = rhs.to_double() * vol;
  }

  // (L3): maximal function of grad w_lambda stays at scale lambda
  {
    SpaceTimeField gl = ltdetail::wl_gradient_mag(R.w_lambda, R.ext);
    M.grad_inf = lp_norm(gl, kInfExponent);
    SpaceTimeField mgl = maximal(gl, mcfg);
    M.l3_max_over_lambda = lp_norm(mgl, kInfExponent) / lambda;
  }

  // (L4): parabolic difference quotients (adjacent + sampled pairs)
  {
    const double h = gx.h(0);
    double worst = 0.0;
    for (int m = 0; m < gx.steps; ++m)
      for (int i = 0; i < gx.cells[0]; ++i)
        for (int j = 0; j < ny; ++j)
          for (int c = 0; c < N; ++c) {
            const double v = R.w_lambda.at(m, i, j, c);
            if (i + 1 < gx.cells[0])
              worst = std::max(worst, std::abs(R.w_lambda.at(m, i + 1, j, c) - v) / h);
            if (gx.n == 2 && j + 1 < ny)
              worst = std::max(worst, std::abs(R.w_lambda.at(m, i, j + 1, c) - v) / h);
            if (m + 1 < gx.steps)
              worst = std::max(worst,
                               std::abs(R.w_lambda.at(m + 1, i, j, c) - v) /
                                   std::sqrt(gx.tau()));
          }
    Rng rng(12345);
    for (int s = 0; s < 20000; ++s) {
      const int m1 = rng.uniform_int(0, gx.steps - 1), m2 = rng.uniform_int(0, gx.steps - 1);
      const int i1 = rng.uniform_int(0, gx.cells[0] - 1), i2 = rng.uniform_int(0, gx.cells[0] - 1);
      const int j1 = gx.n == 2 ? rng.uniform_int(0, ny - 1) : 0;
      const int j2 = gx.n == 2 ? rng.uniform_int(0, ny - 1) : 0;
      double dpar = std::abs(gx.xcenter(0, i1) - gx.xcenter(0, i2));
      if (gx.n == 2) dpar = std::max(dpar, std::abs(gx.xcenter(1, j1) - gx.xcenter(1, j2)));
      dpar = std::max(dpar, std::sqrt(std::abs(gx.tcenter(m1) - gx.tcenter(m2))));
      if (dpar == 0.0) continue;
      for (int c = 0; c < N; ++c)
        worst = std::max(worst, std::abs(R.w_lambda.at(m1, i1, j1, c) -
                                         R.w_lambda.at(m2, i2, j2, c)) / dpar);
    }
    M.l4_max_over_lambda = worst / lambda;
  }

  // (L6): time pairing in L^q against lambda^q times the full energy
  {
    ExactAcc lhs, rhs;
    for (int m = 0; m < gx.steps; ++m)
      for (int i = 0; i < gx.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          if (R.changed[(static_cast<size_t>(m) * gx.cells[0] + i) * ny + j]) {
            double dot = 0.0;
            for (int c = 0; c < N; ++c)
              dot += R.dt_wlambda.at(m, i, j, c) *
                     (R.w_lambda.at(m, i, j, c) - R.w_ext.at(m, i, j, c));
            lhs.add(ltdetail::pow_q(std::abs(dot), q));
          }
          rhs.add(ltdetail::pow_q(gradmag.at(m, i, j), q) + ltdetail::pow_q(Gmag.at(m, i, j), q));
        }
    M.l6_lhs = lhs.to_double() * vol;
    M.l6_rhs = std::pow(lambda, q) * rhs.to_double() * vol;
  }

  // (L7)/(L8): weighted statements over the doubled-time window
  {
    SpaceTimeField omtilde = omega ? extend_weight(*omega, R.ext)
                                   : SpaceTimeField(gx, Rank::Scalar, 1.0);
    SpaceTimeField gl = ltdetail::wl_gradient_mag(R.w_lambda, R.ext);
    ExactAcc l7l, l7r, l8pair, ombad, lpl, lpr;
    for (int m = 0; m < gx.steps; ++m)
      for (int i = 0; i < gx.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          const double om = omtilde.at(m, i, j);
          const bool in2T = R.ext.inside_doubled_time(m) && R.ext.inside_original_space(i, j);
          l7l.add(gl.at(m, i, j) * gl.at(m, i, j) * om);
          l7r.add((gradmag.at(m, i, j) * gradmag.at(m, i, j) +
                   Gmag.at(m, i, j) * Gmag.at(m, i, j)) * om);
          const size_t fl = (static_cast<size_t>(m) * gx.cells[0] + i) * ny + j;
          if (R.changed[fl]) {
            double dot = 0.0;
            for (int c = 0; c < N; ++c)
              dot += R.dt_wlambda.at(m, i, j, c) *
                     (R.w_lambda.at(m, i, j, c) - R.w_ext.at(m, i, j, c));
            l8pair.add(dot * om);
          }
          if (R.bad.mask[fl]) ombad.add(om);
          if (in2T) {
            lpl.add(ltdetail::pow_q(R.w_lambda.magnitude(m, i, j), 2.0));
            lpr.add(ltdetail::pow_q(R.w_ext.magnitude(m, i, j), 2.0));
          }
        }
    M.l7_lhs = l7l.to_double() * vol;
    M.l7_rhs = l7r.to_double() * vol;
    M.l8_lhs = std::abs(l8pair.to_double()) * vol;
    M.l8_rhs = std::sqrt(lambda * lambda * ombad.to_double() * vol) *
               std::sqrt(l7r.to_double() * vol);
    M.lp_lhs = lpl.to_double() * vol;
    M.lp_rhs = lpr.to_double() * vol;
  }

  // pointwise Poincare and the neighbour mean-difference bound
  if (R.bad.count() > 0) {
    double worst = 0.0;
    for (size_t k = 0; k < R.cover.cubes.size(); ++k) {
      const auto& d = R.pou.cubes[k];
      const double rphys = R.cover.cubes[k].radius_phys(gx);
      for (int jn : R.cover.neighbors[k]) {
        const auto& mean_k = R.means[jn];
        for (long long m = d.m0; m < d.m1; ++m)
          for (long long i = d.i0; i < d.i1; ++i)
            for (long long j = d.j0; j < d.j1; ++j) {
              double dev = 0.0;
              for (int c = 0; c < N; ++c)
                dev += std::pow(R.w_ext.at(static_cast<int>(m), static_cast<int>(i),
                                           static_cast<int>(j), c) - mean_k[c], 2);
              dev = std::sqrt(dev) / rphys;
              const double bound = R.mgrad.at(static_cast<int>(m), static_cast<int>(i),
                                              static_cast<int>(j)) +
                                   R.mG.at(static_cast<int>(m), static_cast<int>(i),
                                           static_cast<int>(j));
              if (bound > 0.0) worst = std::max(worst, dev / bound);
            }
      }
    }
    M.poincare_max = worst;

    double meandiff = 0.0;
    for (size_t k = 0; k < R.cover.cubes.size(); ++k) {
      double acc = 0.0;
      for (int jn : R.cover.neighbors[k]) {
        if (jn == static_cast<int>(k)) continue;
        double dv = 0.0;
        for (int c = 0; c < N; ++c) dv += std::pow(R.means[jn][c] - R.means[k][c], 2);
        acc += std::sqrt(dv) / R.cover.cubes[jn].radius_phys(gx);
      }
      meandiff = std::max(meandiff, acc);
    }
    M.mean_diff_max_over_lambda = meandiff / lambda;
  }

  return R;
}

// ---------------------------------------------------------------------------
// Sequence machinery: slab selection and the LS report
// ---------------------------------------------------------------------------

struct SlabSelection {
  double Lambda = 2.0;
  int m0 = 2;
  int m_k = 0;
  double lambda_k = 0.0;
  bool capped = false;              // lambda ladder hit the representable cap
  std::vector<double> slab_energy;  // per m
  double total_energy = 0.0;
  bool pigeonhole_exact = true;     // chosen * (m0+1) <= total, exact compare
  double burcz_value = 0.0;         // lambda^q |O| + lambda^2 omega~(O)
};

// Per-element slab selection: energies of the maximal fields on the dyadic
// slabs {Lambda^{2^m} < M <= Lambda^{2^{m+1}}}, smallest-m argmin.
inline SlabSelection select_level(const SpaceTimeField& w, const SpaceTimeField& G,
                                  const SpaceTimeField* omega, double Lambda, double q) {
  if (!(Lambda > 1.0)) throw std::invalid_argument("select_level: Lambda must exceed 1");
  SlabSelection sel;
  sel.Lambda = Lambda;
  sel.m0 = static_cast<int>(std::ceil(Lambda));

  ExtendedPair ep = extend_spacetime(w, G);
  const GridSpec& gx = ep.ext.extended;
  const int ny = gx.n == 2 ? gx.cells[1] : 1;
  SpaceTimeField gradmag = magnitude_field(extended_gradient(ep.w, ep.ext));
  SpaceTimeField Gmag = magnitude_field(ep.G);
  const MaximalConfig mcfg = MaximalConfig::make(gx);
  SpaceTimeField mgrad = maximal(gradmag, mcfg);
  SpaceTimeField mG = maximal(Gmag, mcfg);
  SpaceTimeField omt = omega ? extend_weight(*omega, ep.ext)
                             : SpaceTimeField(gx, Rank::Scalar, 1.0);

  const double vol = gx.cell_volume();
  std::vector<ExactAcc> acc(sel.m0 + 1);
  ExactAcc total;
  auto slab_of = [&](double v) -> int {
    if (!(v > Lambda)) return -1;
    for (int m = 0; m <= sel.m0; ++m) {
      const double lo = std::pow(Lambda, std::pow(2.0, m));
      const double hi = std::pow(Lambda, std::pow(2.0, m + 1));
      if (v > lo && v <= hi) return m;
    }
    return -2;  // above the ladder
  };
  for (int m = 0; m < gx.steps; ++m)
    for (int i = 0; i < gx.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        const double om = omt.at(m, i, j);
        for (const SpaceTimeField* f : {&mG, &mgrad}) {
          const double v = f->at(m, i, j);
          const int s = slab_of(v);
          if (s >= 0) {
            const double e = (ltdetail::pow_q(v, q) + v * v * om) * vol;
            acc[s].add(e);
            total.add(e);
          }
        }
      }
  sel.slab_energy.resize(sel.m0 + 1);
  int best = 0;
  for (int m = 0; m <= sel.m0; ++m) {
    sel.slab_energy[m] = acc[m].to_double();
    if (acc[m].compare(acc[best]) < 0) best = m;  // exact compare, smallest-m ties
  }
  sel.total_energy = total.to_double();
  sel.m_k = best;
  // exact pigeonhole: chosen * (m0+1) <= sum of all slabs
  ExactAcc lhs = acc[best];
  lhs.mul_uint(static_cast<uint64_t>(sel.m0) + 1);
  sel.pigeonhole_exact = lhs.compare(total) <= 0;

  const double expo = std::pow(2.0, sel.m_k);
  const double lam = std::pow(Lambda, expo);
  if (!std::isfinite(lam) || lam > 1e300) {
    sel.capped = true;
    sel.lambda_k = 1e300;
  } else {
    sel.lambda_k = lam;
  }

  // eq-Burcz quantities at the chosen level
  BadSet bs = bad_set(mgrad, mG, sel.lambda_k);
  ExactAcc om_bad;
  for (int m = 0; m < gx.steps; ++m)
    for (int i = 0; i < gx.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        if (bs.mask[bs.cell(m, i, j)]) om_bad.add(omt.at(m, i, j));
  sel.burcz_value = ltdetail::pow_q(sel.lambda_k, q) * bs.measure() +
                    sel.lambda_k * sel.lambda_k * om_bad.to_double() * vol;
  return sel;
}

// (LS3) identity residual for a fixed C^1 cutoff eta on the original window:
// int G . grad(w_lambda eta) + 1/2 int (|w_lambda|^2 - 2 w . w_lambda) dt eta
// + int_changed dt w_lambda . (w_lambda - w) eta
struct Ls3Breakdown {
  double lhs = 0, time_quadratic = 0, time_pairing_changed = 0, time_pairing_full = 0;
  double residual = 0;
};

inline Ls3Breakdown ls3_residual(const TruncationResult& R,
                                 const std::function<double(double, double, double)>& eta,
                                 const std::function<double(double, double, double)>& eta_dt) {
  const GridSpec& gx = R.ext.extended;
  const GridSpec& g0 = R.ext.original;
  const int N = gx.ncomp;
  const int ny0 = g0.n == 2 ? g0.cells[1] : 1;
  Ls3Breakdown out;

  // restrict w_lambda, w, G to the original window as fields on g0
  SpaceTimeField wl(g0, Rank::Vector), w0(g0, Rank::Vector), G0(g0, Rank::Matrix);
  SpaceTimeField dtwl(g0, Rank::Vector);
  std::vector<uint8_t> ch(static_cast<size_t>(g0.total_cells()), 0);
  for (int m = 0; m < g0.steps; ++m)
    for (int i = 0; i < g0.cells[0]; ++i)
      for (int j = 0; j < ny0; ++j) {
        const int mm = m + R.ext.time_offset;
        const int ii = i + R.ext.space_offset[0];
        const int jj = g0.n == 2 ? j + R.ext.space_offset[1] : 0;
        for (int c = 0; c < N; ++c) {
          wl.at(m, i, j, c) = R.w_lambda.at(mm, ii, jj, c);
          w0.at(m, i, j, c) = R.w_ext.at(mm, ii, jj, c);
          dtwl.at(m, i, j, c) = R.dt_wlambda.at(mm, ii, jj, c);
        }
        for (int c = 0; c < gx.n * N; ++c) G0.at(m, i, j, c) = R.G_ext.at(mm, ii, jj, c);
        ch[(static_cast<size_t>(m) * g0.cells[0] + i) * ny0 + j] =
            R.changed[(static_cast<size_t>(mm) * gx.cells[0] + ii) * (gx.n == 2 ? gx.cells[1] : 1) +
                      jj];
      }

  // product field w_lambda * eta and its discrete gradient
  SpaceTimeField prod = wl;
  for (int m = 0; m < g0.steps; ++m)
    for (int i = 0; i < g0.cells[0]; ++i)
      for (int j = 0; j < ny0; ++j) {
        const double e = eta(g0.xcenter(0, i), g0.n == 2 ? g0.xcenter(1, j) : 0.0,
                             g0.tcenter(m));
        for (int c = 0; c < N; ++c) prod.at(m, i, j, c) *= e;
      }
  SpaceTimeField gprod = discrete_gradient(prod);

  const double vol = g0.cell_volume();
  ExactAcc lhs, quad, pair_ch, pair_full;
  for (int m = 0; m < g0.steps; ++m)
    for (int i = 0; i < g0.cells[0]; ++i)
      for (int j = 0; j < ny0; ++j) {
        const double x = g0.xcenter(0, i);
        const double y = g0.n == 2 ? g0.xcenter(1, j) : 0.0;
        const double t = g0.tcenter(m);
        double dot = 0.0;
        for (int c = 0; c < gx.n * N; ++c) dot += G0.at(m, i, j, c) * gprod.at(m, i, j, c);
        lhs.add(dot * vol);

        double wl2 = 0.0, wdot = 0.0, tp = 0.0;
        for (int c = 0; c < N; ++c) {
          wl2 += wl.at(m, i, j, c) * wl.at(m, i, j, c);
          wdot += w0.at(m, i, j, c) * wl.at(m, i, j, c);
          tp += dtwl.at(m, i, j, c) * (wl.at(m, i, j, c) - w0.at(m, i, j, c));
        }
        quad.add(-0.5 * (wl2 - 2.0 * wdot) * eta_dt(x, y, t) * vol);
        const double pe = tp * eta(x, y, t) * vol;
        pair_full.add(-pe);
        if (ch[(static_cast<size_t>(m) * g0.cells[0] + i) * ny0 + j]) pair_ch.add(-pe);
      }
  out.lhs = lhs.to_double();
  out.time_quadratic = quad.to_double();
  out.time_pairing_changed = pair_ch.to_double();
  out.time_pairing_full = pair_full.to_double();
  out.residual = std::abs(out.lhs - (out.time_quadratic + out.time_pairing_changed));
  return out;
}

// Sequence-level report: the four (LS) statements per element, assembled
// from a truncation at the selected level lambda_k = Lambda^{2^{m_k}}.
struct LsElementReport {
  SlabSelection selection;
  double ls1_value = 0;   // grad sup + C^{1/2} seminorm + time-pair L^q norm
  double ls1_bound = 0;   // C Lambda^{4^Lambda}, capped at 1e300
  double ls2_value = 0;   // L^q + weighted L^2 grad energies + sqrt(Lambda) time term
  double ls2_lp_ratio = 0;
  Ls3Breakdown ls3;
  double ls4_product = 0; // |changed set| * Lambda
};

inline LsElementReport truncation_sequence_element(
    const SpaceTimeField& w, const SpaceTimeField& G, const SpaceTimeField* omega, double Lambda,
    double q, double gate, const std::function<double(double, double, double)>& eta,
    const std::function<double(double, double, double)>& eta_dt) {
  LsElementReport rep;
  rep.selection = select_level(w, G, omega, Lambda, q);
  TruncationResult R = truncate(w, G, rep.selection.lambda_k, omega, gate, q);
  const GridSpec& gx = R.ext.extended;
  const int ny = gx.n == 2 ? gx.cells[1] : 1;

  // C^{1/2} seminorm and sup-gradient are part of the L4/L3 measurements
  const double semi = R.meas.l4_max_over_lambda * R.lambda;
  double tl_q = 0.0;
  {
    ExactAcc acc;
    for (int m = 0; m < gx.steps; ++m)
      for (int i = 0; i < gx.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          const size_t fl = (static_cast<size_t>(m) * gx.cells[0] + i) * ny + j;
          if (!R.changed[fl]) continue;
          double dot = 0.0;
          for (int c = 0; c < gx.ncomp; ++c)
            dot += R.dt_wlambda.at(m, i, j, c) *
                   (R.w_lambda.at(m, i, j, c) - R.w_ext.at(m, i, j, c));
          acc.add(ltdetail::pow_q(std::abs(dot), q));
        }
    tl_q = std::pow(acc.to_double() * gx.cell_volume(), 1.0 / q);
  }
  rep.ls1_value = R.meas.grad_inf + semi + tl_q;
  const double expo = std::pow(4.0, Lambda);
  const double bound = std::pow(Lambda, std::min(expo, 900.0));
  rep.ls1_bound = std::isfinite(bound) ? bound : 1e300;

  {
    // int |grad w_lambda|^q + |grad w_lambda|^2 omega~ + sqrt(Lambda)|pair| omega~
    SpaceTimeField gl = ltdetail::wl_gradient_mag(R.w_lambda, R.ext);
    SpaceTimeField omt = omega ? extend_weight(*omega, R.ext)
                               : SpaceTimeField(gx, Rank::Scalar, 1.0);
    ExactAcc acc;
    for (int m = 0; m < gx.steps; ++m)
      for (int i = 0; i < gx.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          const double om = omt.at(m, i, j);
          const double gv = gl.at(m, i, j);
          double term = ltdetail::pow_q(gv, q) + gv * gv * om;
          const size_t fl = (static_cast<size_t>(m) * gx.cells[0] + i) * ny + j;
          if (R.changed[fl]) {
            double dot = 0.0;
            for (int c = 0; c < gx.ncomp; ++c)
              dot += R.dt_wlambda.at(m, i, j, c) *
                     (R.w_lambda.at(m, i, j, c) - R.w_ext.at(m, i, j, c));
            term += std::sqrt(Lambda) * std::abs(dot) * om;
          }
          acc.add(term);
        }
    rep.ls2_value = acc.to_double() * gx.cell_volume();
    rep.ls2_lp_ratio = R.meas.lp_rhs > 0 ? R.meas.lp_lhs / R.meas.lp_rhs : 0.0;
  }
  rep.ls3 = ls3_residual(R, eta, eta_dt);
  rep.ls4_product = R.changed_measure() * Lambda;
  return rep;
}

}  // namespace parab
