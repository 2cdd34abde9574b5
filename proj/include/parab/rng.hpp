#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "parab/field.hpp"

namespace parab {

// Deterministic RNG front-end. std::mt19937_64 output is pinned by the
// standard; the distributions here are hand-rolled so streams are identical
// across standard libraries.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller, one value per call (cached pair)
    if (have_) {
      have_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

  int uniform_int(int lo, int hi) {  // inclusive
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(eng_() % span);
  }

  uint64_t raw() { return eng_(); }

private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool have_ = false;
};

inline SpaceTimeField random_field(const GridSpec& g, Rank rank, Rng& rng, double lo = -1.0,
                                   double hi = 1.0) {
  SpaceTimeField f(g, rank);
  for (double& v : f.values()) v = rng.uniform(lo, hi);
  return f;
}

inline SpaceTimeField random_positive_field(const GridSpec& g, Rng& rng, double lo = 0.1,
                                            double hi = 2.0) {
  SpaceTimeField f(g, Rank::Scalar);
  for (double& v : f.values()) v = rng.uniform(lo, hi);
  return f;
}

// mollified point mass: smooth bump of given parabolic width centered at
// (xc, tc), normalized to unit space-time integral
inline SpaceTimeField mollified_point_mass(const GridSpec& g, double xc0, double xc1, double tc,
                                           double width, Rank rank = Rank::Scalar) {
  SpaceTimeField f(g, rank);
  const int ny = g.n == 2 ? g.cells[1] : 1;
  auto bump1 = [](double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; };
  double mass = 0.0;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        double v = bump1((g.xcenter(0, i) - xc0) / width);
        if (g.n == 2) v *= bump1((g.xcenter(1, j) - xc1) / width);
        v *= bump1((g.tcenter(m) - tc) / (width * width));
        f.at(m, i, j, 0) = v;
        mass += v * g.cell_volume();
      }
  if (mass > 0.0) f *= 1.0 / mass;
  return f;
}

}  // namespace parab
