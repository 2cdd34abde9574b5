#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parab/field.hpp"
#include "parab/rng.hpp"

namespace parab {

// Linear diffusion tensor: scalar cellwise coefficient times a constant
// symmetric positive-definite N x N component coupling (identity unless the
// system is genuinely coupled). Cross-axis coupling is not represented; no
// experiment in this suite exercises it.
struct LinearTensor {
  SpaceTimeField coeff;             // scalar, strictly positive
  std::vector<double> comp_matrix;  // N x N row-major, empty = identity
  double c0 = 1.0, c1 = 1.0;        // recorded ellipticity bounds

  static LinearTensor constant(const GridSpec& g, double value) {
    LinearTensor t;
    t.coeff = SpaceTimeField(g, Rank::Scalar, value);
    t.c0 = t.c1 = value;
    return t;
  }
  static LinearTensor from_field(SpaceTimeField a) {
    LinearTensor t;
    double lo = a.values()[0], hi = lo;
    for (double v : a.values()) {
      if (!(v > 0.0)) throw std::invalid_argument("tensor: coefficient must be positive");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    t.coeff = std::move(a);
    t.c0 = lo;
    t.c1 = hi;
    return t;
  }

  double oscillation() const {
    double lo = coeff.values()[0], hi = lo;
    for (double v : coeff.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  }

  // spot-check the ellipticity bounds on random directions
  bool spot_check(Rng& rng, int samples = 1000) const {
    const int N = comp_matrix.empty() ? 1 : static_cast<int>(std::sqrt(comp_matrix.size()));
    for (int s = 0; s < samples; ++s) {
      std::vector<double> eta(N);
      double n2 = 0.0;
      for (auto& e : eta) {
        e = rng.normal();
        n2 += e * e;
      }
      if (n2 == 0.0) continue;
      double quad = 0.0;
      if (comp_matrix.empty()) {
        quad = n2;
      } else {
        for (int a = 0; a < N; ++a)
          for (int b = 0; b < N; ++b) quad += eta[a] * comp_matrix[a * N + b] * eta[b];
      }
      const size_t cell = rng.raw() % coeff.values().size();
      const double v = coeff.values()[cell];
      if (!(v * quad >= c0 * n2 * (1 - 1e-9) && v * quad <= c1 * n2 * (1 + 1e-9))) return false;
    }
    return true;
  }
};

// Nonlinear law A(z; Q) = nu(|Q|) Q with bounded strictly positive nu and
// nu(s) -> nu_inf. The admissible profiles min/max{nu_inf, s^{p-2}} make the
// law a linear-at-infinity approximation of the parabolic p-Laplacian.
struct NonlinearLaw {
  enum class Profile { Constant, MinPower, MaxPower };
  Profile profile = Profile::Constant;
  double p = 2.0;
  double nu_inf = 1.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // recorded growth constants

  double nu(double s) const {
    switch (profile) {
      case Profile::Constant: return nu_inf;
      case Profile::MinPower: return std::min(nu_inf, std::pow(s, p - 2.0));
      case Profile::MaxPower: return std::max(nu_inf, std::pow(s, p - 2.0));
    }
    return nu_inf;
  }

  // frozen Picard coefficient; MaxPower profiles blow up at s = 0, the cap
  // keeps the linear systems well posed (A(Q) itself stays bounded)
  double picard_coeff(double s) const {
    const double v = s > 0.0 ? nu(s) : (profile == Profile::MaxPower ? 1e12 : nu(0.0));
    return std::min(v, 1e12);
  }

  bool is_linear() const { return profile == Profile::Constant; }

  // A(Q) for a component-flattened gradient (n*N entries); A(0) = 0 for all
  // admissible profiles (|A| = nu(s) s -> 0)
  void apply(const std::vector<double>& Q, std::vector<double>& out) const {
    out.assign(Q.size(), 0.0);
    double s2 = 0.0;
    for (double q : Q) s2 += q * q;
    if (s2 == 0.0) return;
    const double v = nu(std::sqrt(s2));
    for (size_t k = 0; k < Q.size(); ++k) out[k] = v * Q[k];
  }

  static NonlinearLaw linear(double nu0 = 1.0) {
    NonlinearLaw l;
    l.profile = Profile::Constant;
    l.nu_inf = nu0;
    l.c0 = nu0;
    l.c1 = nu0;
    return l;
  }
  static NonlinearLaw min_power(double p, double nu_inf = 1.0) {
    if (!(p > 2.0)) throw std::invalid_argument("min_power profile needs p > 2");
    NonlinearLaw l;
    l.profile = Profile::MinPower;
    l.p = p;
    l.nu_inf = nu_inf;
    return l;
  }
  static NonlinearLaw max_power(double p, double nu_inf = 1.0) {
    if (!(p >= 1.0 && p < 2.0)) throw std::invalid_argument("max_power profile needs p in [1,2)");
    NonlinearLaw l;
    l.profile = Profile::MaxPower;
    l.p = p;
    l.nu_inf = nu_inf;
    return l;
  }
};

struct LawValidation {
  bool growth = true;        // c0|Q|^2 - c2 <= A.Q and |A| <= c1|Q| + c2
  bool monotone = true;      // (A(Q)-A(P)).(Q-P) >= 0 on sampled pairs
  std::vector<double> q_ladder;        // |Q| ladder for the modulus table
  std::vector<double> eps_modulus;     // sup |A(Q) - tildeA Q| / |Q| at each rung
  std::vector<double> jac_modulus;     // sup |dA/dQ - tildeA| at each rung (ass:B)
  double c0 = 0.0, c1 = 0.0, c2 = 0.0; // fitted growth constants
  bool linear_at_infinity = true;      // eps_modulus decreasing to ~0
};

// Sample-based validation of the structural assumptions; dims = n*N.
inline LawValidation validate_law(const NonlinearLaw& law, int dims, Rng& rng,
                                  int samples = 10000) {
  LawValidation v;
  // growth constants for the admissible profiles: nu in (0, numax] with
  // numax = max over sampled s; use them and verify on the sample
  double numax = law.nu_inf, numin = law.nu_inf;
  std::vector<double> Q(dims), P(dims), AQ, AP;
  for (int s = 0; s < samples; ++s) {
    double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    double q2 = 0.0, p2 = 0.0;
    for (int k = 0; k < dims; ++k) {
      Q[k] = rng.normal() * scale;
      P[k] = rng.normal() * scale;
      q2 += Q[k] * Q[k];
      p2 += P[k] * P[k];
    }
    const double nq = law.nu(std::sqrt(q2));
    numax = std::max(numax, nq);
    numin = std::min(numin, nq);
    law.apply(Q, AQ);
    law.apply(P, AP);
    double inc = 0.0;
    for (int k = 0; k < dims; ++k) inc += (AQ[k] - AP[k]) * (Q[k] - P[k]);
    if (inc < -1e-12 * (q2 + p2)) v.monotone = false;
  }
  // record growth constants: A.Q = nu |Q|^2 >= numin_at_large |Q|^2 - c2;
  // for the capped profiles nu >= min(nu_inf, 1) for |Q| >= 1, so
  v.c0 = std::min(law.nu_inf, 1.0);
  v.c1 = numax;
  v.c2 = std::max(1.0, numax);
  for (int s = 0; s < samples / 10; ++s) {
    double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    double q2 = 0.0;
    for (int k = 0; k < dims; ++k) {
      Q[k] = rng.normal() * scale;
      q2 += Q[k] * Q[k];
    }
    law.apply(Q, AQ);
    double aq = 0.0, anorm = 0.0;
    for (int k = 0; k < dims; ++k) {
      aq += AQ[k] * Q[k];
      anorm += AQ[k] * AQ[k];
    }
    anorm = std::sqrt(anorm);
    if (aq < v.c0 * q2 - v.c2 - 1e-9) v.growth = false;
    if (anorm > v.c1 * std::sqrt(q2) + v.c2 + 1e-9) v.growth = false;
  }
  // linear-at-infinity modulus table on a |Q| ladder
  for (int e = 0; e <= 10; ++e) {
    const double r = std::pow(2.0, e - 2);
    double worst = 0.0, jworst = 0.0;
    for (int s = 0; s < 200; ++s) {
      double q2 = 0.0;
      for (int k = 0; k < dims; ++k) {
        Q[k] = rng.normal();
        q2 += Q[k] * Q[k];
      }
      const double nrm = std::sqrt(q2);
      for (int k = 0; k < dims; ++k) Q[k] *= r / nrm;
      law.apply(Q, AQ);
      double dev = 0.0;
      for (int k = 0; k < dims; ++k) dev += std::pow(AQ[k] - law.nu_inf * Q[k], 2);
      worst = std::max(worst, std::sqrt(dev) / r);
      // Jacobian deviation by finite differences
      const double hfd = 1e-6 * r;
      for (int d = 0; d < dims; ++d) {
        std::vector<double> Q2 = Q;
        Q2[d] += hfd;
        std::vector<double> A2;
        law.apply(Q2, A2);
        for (int k = 0; k < dims; ++k) {
          const double jac = (A2[k] - AQ[k]) / hfd;
          const double tA = (k == d) ? law.nu_inf : 0.0;
          jworst = std::max(jworst, std::abs(jac - tA));
        }
      }
    }
    v.q_ladder.push_back(r);
    v.eps_modulus.push_back(worst);
    v.jac_modulus.push_back(jworst);
  }
  // decreasing tail towards zero
  const size_t last = v.eps_modulus.size() - 1;
  if (!(v.eps_modulus[last] <= 0.05 && v.eps_modulus[last] <= v.eps_modulus[last / 2] + 1e-12))
    v.linear_at_infinity = false;
  return v;
}

}  // namespace parab
