#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "parab/maximal.hpp"
#include "parab/norms.hpp"
#include "parab/rng.hpp"

using namespace parab;

namespace {
GridSpec unit_grid(int n, int nx, int nt, int ncomp = 1) {
  return make_grid_counts(n, ncomp, {1.0, 1.0}, 1.0, {nx, nx}, nt);
}
}  // namespace

TEST_CASE("maximal of constants and indicators") {
  const GridSpec g = unit_grid(2, 8, 8);
  const MaximalConfig cfg = MaximalConfig::make(g);

  SECTION("constant field") {
    SpaceTimeField f(g, Rank::Scalar, 2.5);
    SpaceTimeField m = maximal(f, cfg);
    for (double v : m.values()) CHECK(v == 2.5);
  }

  SECTION("single cell indicator") {
    SpaceTimeField f(g, Rank::Scalar);
    f.at(4, 3, 3) = 1.0;
    SpaceTimeField m = maximal(f, cfg);
    CHECK(m.at(4, 3, 3) == 1.0);
    // decays with distance, never increases past the peak
    CHECK(m.at(4, 7, 7) < m.at(4, 4, 4));
    CHECK(m.at(4, 7, 7) > 0.0);
    // empty ladder rejected
    MaximalConfig bad = cfg;
    bad.rungs.clear();
    CHECK_THROWS(maximal(f, bad));
  }
}

TEST_CASE("fast maximal equals the oracle bitwise") {
  Rng rng(21);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = rep % 2 ? 2 : 1;
    const GridSpec g = unit_grid(n, n == 2 ? 8 : 16, 16);
    const SpaceTimeField f = random_field(g, Rank::Scalar, rng, -2.0, 2.0);
    const MaximalConfig cfg = MaximalConfig::make(g);
    const SpaceTimeField a = maximal(f, cfg);
    const SpaceTimeField b = oracle_maximal(f, cfg);
    REQUIRE(a.values().size() == b.values().size());
    bool equal = true;
    for (size_t k = 0; k < a.values().size(); ++k)
      if (a.values()[k] != b.values()[k]) equal = false;
    CHECK(equal);
  }
}

TEST_CASE("maximal invariants") {
  const GridSpec g = unit_grid(2, 8, 16);
  Rng rng(22);
  const SpaceTimeField f = random_field(g, Rank::Scalar, rng);
  const SpaceTimeField h = random_field(g, Rank::Scalar, rng);
  const MaximalConfig cfg = MaximalConfig::make(g);
  // anchor rung resolves a single cell; needed for the pointwise bound
  REQUIRE(cfg.rungs.front().tdepth == 1);
  REQUIRE(cfg.rungs.front().irad == 0);

  const SpaceTimeField mf = maximal(f, cfg);
  const SpaceTimeField mh = maximal(h, cfg);

  SECTION("pointwise lower bound and homogeneity") {
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < g.cells[1]; ++j) CHECK(mf.at(m, i, j) >= f.magnitude(m, i, j));
    const SpaceTimeField m4 = maximal(scaled(f, -4.0), cfg);
    for (size_t k = 0; k < m4.values().size(); ++k)
      CHECK(m4.values()[k] == 4.0 * mf.values()[k]);
  }

  SECTION("sublinearity") {
    SpaceTimeField s = f;
    s += h;
    const SpaceTimeField ms = maximal(s, cfg);
    for (size_t k = 0; k < ms.values().size(); ++k)
      CHECK(ms.values()[k] <= mf.values()[k] + mh.values()[k] + 1e-12);
  }
}

TEST_CASE("power and restricted variants") {
  const GridSpec g = unit_grid(1, 16, 16);
  Rng rng(23);
  const SpaceTimeField f = random_field(g, Rank::Scalar, rng, 0.0, 3.0);

  SECTION("q=1 unrestricted equals maximal") {
    const SpaceTimeField a = maximal_q_restricted(f, 1.0);
    const SpaceTimeField b = maximal(f, MaximalConfig::make(g));
    for (size_t k = 0; k < a.values().size(); ++k) CHECK(a.values()[k] == b.values()[k]);
  }

  SECTION("constant field fixed point for q=2") {
    SpaceTimeField c(g, Rank::Scalar, 1.75);
    const SpaceTimeField m = maximal_q_restricted(c, 2.0);
    for (double v : m.values()) CHECK(v == Catch::Approx(1.75).epsilon(1e-14));
  }

  SECTION("identity with maximal of the powered field") {
    const double q = 2.0;
    SpaceTimeField fq = f;
    for (double& v : fq.values()) v = maximal_cell_power(std::abs(v), q);
    const SpaceTimeField route1 = maximal_q_restricted(f, q);
    SpaceTimeField route2 = maximal(fq, MaximalConfig::make(g));
    for (double& v : route2.values()) v = std::pow(v, 1.0 / q);
    for (size_t k = 0; k < route1.values().size(); ++k)
      CHECK(route1.values()[k] == route2.values()[k]);
  }

  SECTION("restriction to the smallest rung is the single cylinder mean") {
    const double rho = g.h(0) / 2;
    const SpaceTimeField m = maximal_q_restricted(f, 1.0, rho);
    const MaximalConfig cfg = MaximalConfig::make(g, 1.0, rho);
    REQUIRE(cfg.rungs.size() == 1);
    // interior cell: mean over the anchor column of depth ceil(r^2/tau)
    const SpaceTimeField o = oracle_maximal(f, cfg);
    for (size_t k = 0; k < m.values().size(); ++k) CHECK(m.values()[k] == o.values()[k]);
  }
}
