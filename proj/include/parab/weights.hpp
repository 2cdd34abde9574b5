#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parab/exact_sum.hpp"
#include "parab/field.hpp"
#include "parab/maximal.hpp"

namespace parab {

// omega^e with the reciprocal special-cased so that exponent -1 is an exact
// IEEE division (keeps the p=2 duality and scaling identities tight)
inline double weight_power(double w, double e) {
  if (e == 1.0) return w;
  if (e == -1.0) return 1.0 / w;
  return std::pow(w, e);
}

struct WeightField {
  SpaceTimeField omega;
  double p = 2.0;
  double ap_hat = 1.0;
};

struct ApCylinderStat {
  int m, i, j;      // anchor cell
  double r;         // rung radius
  double mean_w;    // clipped cylinder mean of omega
  double mean_dual; // clipped cylinder mean of omega^{-(p'-1)}
};

struct ApEstimate {
  double constant = 1.0;      // max over the sample of the defining product
  double min_product = 1.0;   // Jensen floor diagnostic
  ApCylinderStat argmax{};
  double dual_constant = 1.0; // same sample, products re-exponentiated
};

namespace detail {

struct ClippedRange {
  long long m0, m1, i0, i1, j0, j1;
  long long count() const { return (m1 - m0) * (i1 - i0) * (j1 - j0); }
};

inline ClippedRange clip_cylinder(const GridSpec& g, const MaximalRung& rung,
                                  CylOrientation orient, int m, int i, int j) {
  ClippedRange c{};
  const bool backward = orient == CylOrientation::Backward;
  c.m0 = std::max<long long>(0, m - rung.tdepth + 1);
  c.m1 = std::min<long long>(g.steps, backward ? m + 1 : m + rung.tdepth);
  c.i0 = std::max<long long>(0, i - rung.irad);
  c.i1 = std::min<long long>(g.cells[0], i + rung.irad + 1);
  if (g.n == 2) {
    c.j0 = std::max<long long>(0, j - rung.irad);
    c.j1 = std::min<long long>(g.cells[1], j + rung.irad + 1);
  } else {
    c.j0 = 0;
    c.j1 = 1;
  }
  return c;
}

}  // namespace detail

// A_p constant over the finite cylinder family (all ladder cylinders at all
// cells, clipped to the grid, backward orientation). Lower bound for the
// continuum supremum; every downstream inequality is tested against the same
// family.
inline ApEstimate ap_constant_detail(const SpaceTimeField& omega, double p,
                                     const MaximalConfig* sample = nullptr) {
  if (!(p > 1.0)) throw std::invalid_argument("ap_constant: p must be > 1 (use a1_constant)");
  if (omega.rank() != Rank::Scalar) throw std::invalid_argument("ap_constant: scalar weight");
  const GridSpec& g = omega.grid();
  for (double v : omega.values())
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("ap_constant: weight must be positive and finite");
  MaximalConfig own;
  if (!sample) {
    own = MaximalConfig::make(g);
    sample = &own;
  }
  const double pprime = p / (p - 1.0);
  const double dual_e = -(pprime - 1.0);
  detail::ExactPrefix pw(g, [&](int m, int i, int j) { return omega.at(m, i, j); });
  detail::ExactPrefix pd(g, [&](int m, int i, int j) {
    return weight_power(omega.at(m, i, j), dual_e);
  });
  ApEstimate est;
  est.constant = 0.0;
  est.dual_constant = 0.0;
  est.min_product = std::numeric_limits<double>::infinity();
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        for (const auto& rung : sample->rungs) {
          const auto c = detail::clip_cylinder(g, rung, sample->orientation, m, i, j);
          const double cnt = static_cast<double>(c.count());
          const double A = pw.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double() / cnt;
          const double B = pd.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double() / cnt;
          const double prod = A * weight_power(B, p - 1.0);
          const double dual_prod = B * weight_power(A, pprime - 1.0);
          if (prod > est.constant) {
            est.constant = prod;
            est.argmax = {m, i, j, rung.r, A, B};
          }
          est.dual_constant = std::max(est.dual_constant, dual_prod);
          est.min_product = std::min(est.min_product, prod);
        }
  return est;
}

inline double ap_constant(const SpaceTimeField& omega, double p,
                          const MaximalConfig* sample = nullptr) {
  return ap_constant_detail(omega, p, sample).constant;
}

// pointwise dual weight omega^{-(p'-1)}
inline SpaceTimeField dual_weight(const SpaceTimeField& omega, double p) {
  const double pprime = p / (p - 1.0);
  SpaceTimeField d = omega;
  for (double& v : d.values()) v = weight_power(v, -(pprime - 1.0));
  return d;
}

// clipped-mean maximal function of a weight (same ladder, denominators count
// only in-grid cells, as all weight averages do)
inline SpaceTimeField maximal_clipped(const SpaceTimeField& omega,
                                      const MaximalConfig* sample = nullptr) {
  const GridSpec& g = omega.grid();
  MaximalConfig own;
  if (!sample) {
    own = MaximalConfig::make(g);
    sample = &own;
  }
  detail::ExactPrefix pw(g, [&](int m, int i, int j) { return std::abs(omega.at(m, i, j)); });
  SpaceTimeField out(g, Rank::Scalar);
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        double best = 0.0;
        for (const auto& rung : sample->rungs) {
          const auto c = detail::clip_cylinder(g, rung, sample->orientation, m, i, j);
          const double mean =
              pw.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double() /
              static_cast<double>(c.count());
          best = std::max(best, mean);
        }
        out.at(m, i, j) = best;
      }
  return out;
}

// A_1 constant: max_z M(omega)(z) / omega(z) over the sampled family
inline double a1_constant(const SpaceTimeField& omega,
                          const MaximalConfig* sample = nullptr) {
  for (double v : omega.values())
    if (!(v > 0.0)) throw std::invalid_argument("a1_constant: weight must be positive");
  SpaceTimeField m = maximal_clipped(omega, sample);
  double best = 0.0;
  for (size_t k = 0; k < m.values().size(); ++k)
    best = std::max(best, m.values()[k] / omega.values()[k]);
  return best;
}

// omega_0 = (1 + Mf)^{q0-2}: the A_2 weight that restores the duality
// pairing for forcings below the L^2 threshold
inline WeightField weight_from_maximal(const SpaceTimeField& f, double q0) {
  if (!(q0 > 1.0 && q0 < 2.0)) throw std::invalid_argument("weight_from_maximal: q0 in (1,2)");
  SpaceTimeField mf = maximal(f, MaximalConfig::make(f.grid()));
  SpaceTimeField w(f.grid(), Rank::Scalar);
  const double e = q0 - 2.0;
  for (size_t k = 0; k < w.values().size(); ++k)
    w.values()[k] = std::pow(1.0 + mf.values()[k], e);
  WeightField out{std::move(w), 2.0, 1.0};
  out.ap_hat = ap_constant(out.omega, 2.0);
  return out;
}

enum class CombineOp { Min, Max };

inline SpaceTimeField weight_combine(const SpaceTimeField& w1, const SpaceTimeField& w2,
                                     CombineOp op) {
  if (!w1.grid().same_layout(w2.grid())) throw std::invalid_argument("weight_combine: grids");
  SpaceTimeField out = w1;
  for (size_t k = 0; k < out.values().size(); ++k)
    out.values()[k] = op == CombineOp::Min ? std::min(w1.values()[k], w2.values()[k])
                                           : std::max(w1.values()[k], w2.values()[k]);
  return out;
}

struct ReverseHolderResult {
  bool found = false;
  double s = 1.0;
  double constant = 1.0;  // max over cylinders of (mean w^s)^{1/s} / mean w
};

// Largest ladder s with the reverse Hoelder ratio below the threshold;
// reports failure at the finest s if even s=1.05 exceeds it.
inline ReverseHolderResult reverse_holder_exponent(const SpaceTimeField& omega,
                                                   double threshold = 4.0,
                                                   double s_max = 3.0,
                                                   const MaximalConfig* sample = nullptr) {
  const GridSpec& g = omega.grid();
  MaximalConfig own;
  if (!sample) {
    own = MaximalConfig::make(g);
    sample = &own;
  }
  detail::ExactPrefix pw(g, [&](int m, int i, int j) { return omega.at(m, i, j); });
  const int ny = g.n == 2 ? g.cells[1] : 1;
  ReverseHolderResult res;
  for (double s = 1.05; s <= s_max + 1e-9; s += 0.05) {
    detail::ExactPrefix ps(g, [&](int m, int i, int j) {
      return std::pow(omega.at(m, i, j), s);
    });
    double worst = 0.0;
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < ny; ++j)
          for (const auto& rung : sample->rungs) {
            const auto c = detail::clip_cylinder(g, rung, sample->orientation, m, i, j);
            const double cnt = static_cast<double>(c.count());
            const double ms = ps.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double() / cnt;
            const double m1 = pw.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double() / cnt;
            worst = std::max(worst, std::pow(ms, 1.0 / s) / m1);
          }
    if (worst <= threshold) {
      res.found = true;
      res.s = s;
      res.constant = worst;
    } else {
      break;
    }
  }
  return res;
}

struct EmbeddingCheck {
  double q_tilde = 1.0;
  double max_ratio = 0.0;  // max over cylinders of LHS / RHS; <= 1 + eps expected
};

// Per-cylinder embedding (mean |f|^qt)^{1/qt} <= C (omega(Q)^{-1} int |f|^p w)^{1/p}
// with qt = s p/(p+s-1), s from the reverse Hoelder exponent of the dual
// weight and C = C_RH^{1/p'} * Ap^{1/p}.
inline EmbeddingCheck embedding_check(const SpaceTimeField& f, const SpaceTimeField& omega,
                                      double p, const MaximalConfig* sample = nullptr) {
  const GridSpec& g = f.grid();
  MaximalConfig own;
  if (!sample) {
    own = MaximalConfig::make(g);
    sample = &own;
  }
  const double pprime = p / (p - 1.0);
  const SpaceTimeField sigma = dual_weight(omega, p);
  const ReverseHolderResult rh = reverse_holder_exponent(sigma, 8.0, 2.0, sample);
  const double s = rh.found ? rh.s : 1.05;
  const double crh = rh.found ? rh.constant : 1e30;
  const double qt = s * p / (p + s - 1.0);
  const double ap = ap_constant(omega, p, sample);
  const double C = std::pow(crh, 1.0 / pprime) * std::pow(ap, 1.0 / p);

  detail::ExactPrefix pfq(g, [&](int m, int i, int j) {
    return std::pow(f.magnitude(m, i, j), qt);
  });
  detail::ExactPrefix pfpw(g, [&](int m, int i, int j) {
    return std::pow(f.magnitude(m, i, j), p) * omega.at(m, i, j);
  });
  detail::ExactPrefix pw(g, [&](int m, int i, int j) { return omega.at(m, i, j); });

  EmbeddingCheck out;
  out.q_tilde = qt;
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        for (const auto& rung : sample->rungs) {
          const auto c = detail::clip_cylinder(g, rung, sample->orientation, m, i, j);
          const double cnt = static_cast<double>(c.count());
          const double lhs =
              std::pow(pfq.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double() / cnt, 1.0 / qt);
          const double wmass = pw.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double();
          const double fpw = pfpw.range(c.m0, c.m1, c.i0, c.i1, c.j0, c.j1).to_double();
          if (wmass <= 0.0 || fpw < 0.0) continue;
          const double rhs = C * std::pow(fpw / wmass, 1.0 / p);
          if (rhs > 0.0) out.max_ratio = std::max(out.max_ratio, lhs / rhs);
        }
  return out;
}

}  // namespace parab
