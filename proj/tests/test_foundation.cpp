#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "parab/cylinder.hpp"
#include "parab/exact_sum.hpp"
#include "parab/extension.hpp"
#include "parab/field.hpp"
#include "parab/gradient.hpp"
#include "parab/grid.hpp"
#include "parab/norms.hpp"
#include "parab/rng.hpp"

using namespace parab;

namespace {
GridSpec unit_grid(int n, int nx, int nt, int ncomp = 1) {
  return make_grid_counts(n, ncomp, {1.0, 1.0}, 1.0, {nx, nx}, nt);
}
}  // namespace

TEST_CASE("exact accumulator sums doubles exactly") {
  ExactAcc a;
  a.add(1e308);
  a.add(1.0);
  a.add(-1e308);
  CHECK(a.to_double() == 1.0);

  a.clear();
  a.add(0.1);
  a.add(0.2);
  // correctly rounded sum of the two doubles nearest 0.1 and 0.2
  CHECK(a.to_double() == 0.1 + 0.2);

  // order independence on a rough cancellation mix
  Rng rng(7);
  std::vector<double> xs;
  for (int k = 0; k < 2000; ++k) xs.push_back((rng.uniform() - 0.5) * std::pow(10.0, rng.uniform_int(-30, 30)));
  ExactAcc fwd, bwd;
  for (double x : xs) fwd.add(x);
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) bwd.add(*it);
  CHECK(fwd.to_double() == bwd.to_double());

  // difference of accumulators matches accumulating the negated tail
  ExactAcc head, tail, both;
  for (int k = 0; k < 1000; ++k) head.add(xs[k]);
  for (int k = 1000; k < 2000; ++k) tail.add(xs[k]);
  both = head;
  both.add(tail);
  CHECK(both.to_double() == fwd.to_double());

  // scaling by a power of two commutes exactly
  ExactAcc scaled;
  for (double x : xs) scaled.add(x * 1024.0);
  CHECK(scaled.to_double() == fwd.to_double() * 1024.0);

  // integer sums are exact
  ExactAcc ints;
  for (int k = 1; k <= 100000; ++k) ints.add(static_cast<double>(k));
  CHECK(ints.to_double() == 100000.0 * 100001.0 / 2.0);
}

TEST_CASE("grid construction and preconditions") {
  const GridSpec g = unit_grid(1, 8, 8);
  CHECK(g.total_cells() == 64);
  CHECK(g.cell_volume() == Catch::Approx(g.h(0) * g.tau()));

  const GridSpec g2 = unit_grid(2, 4, 8);
  CHECK(g2.h(0) * g2.h(1) == Catch::Approx(0.25 * 0.25));

  CHECK_THROWS(make_grid(1, 1, {1.0, 1.0}, 1.0, 0.0, 0.125));
  CHECK_THROWS(make_grid(1, 1, {1.0, 1.0}, 1.0, 0.125, 0.0));
  CHECK_THROWS(make_grid_counts(1, 1, {1.0, 1.0}, 1.0, {2, 2}, 8));  // too few cells
}

TEST_CASE("lp norms match the direct summation oracle") {
  const GridSpec g = unit_grid(2, 8, 8, 2);
  Rng rng(11);
  const SpaceTimeField f = random_field(g, Rank::Vector, rng);

  SECTION("constant fields") {
    SpaceTimeField one(unit_grid(1, 8, 8), Rank::Scalar, 1.0);
    CHECK(lp_norm(one, 2.0) == Catch::Approx(1.0).margin(1e-14));
    SpaceTimeField two(unit_grid(1, 8, 8), Rank::Scalar, 2.0);
    CHECK(lp_norm(two, 1.0) == Catch::Approx(2.0).margin(1e-14));
  }

  SECTION("random field vs naive sum") {
    double s = 0.0;
    const int ny = g.cells[1];
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) s += std::pow(f.magnitude(m, i, j), 2.0) * g.cell_volume();
    CHECK(lp_norm(f, 2.0) == Catch::Approx(std::sqrt(s)).epsilon(1e-13));
  }

  SECTION("homogeneity and weighted consistency") {
    const double c = -3.7;
    CHECK(lp_norm(scaled(f, c), 2.0) ==
          Catch::Approx(std::abs(c) * lp_norm(f, 2.0)).epsilon(1e-13));
    SpaceTimeField one(g, Rank::Scalar, 1.0);
    CHECK(weighted_lp_norm(f, one, 2.0) == lp_norm(f, 2.0));  // bitwise
    CHECK(lp_norm(f, kInfExponent) >= lp_norm(f, 4.0) * 0.99);
  }

  SECTION("weighted norm against oracle and positivity guard") {
    Rng rng2(12);
    SpaceTimeField w = random_positive_field(g, rng2);
    double s = 0.0;
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < g.cells[1]; ++j)
          s += std::pow(f.magnitude(m, i, j), 1.5) * w.at(m, i, j) * g.cell_volume();
    CHECK(weighted_lp_norm(f, w, 1.5) == Catch::Approx(std::pow(s, 1 / 1.5)).epsilon(1e-13));
    w.at(0, 0, 0) = -1.0;
    CHECK_THROWS(weighted_lp_norm(f, w, 2.0));
  }
}

TEST_CASE("discrete gradient stencils") {
  // power-of-two grid so affine fields differentiate bitwise
  const GridSpec g = make_grid_counts(1, 1, {1.0, 1.0}, 1.0, {16, 16}, 8);

  SECTION("constants and affine fields") {
    SpaceTimeField c(g, Rank::Vector, 4.25);
    SpaceTimeField gc = discrete_gradient(c);
    for (double v : gc.values()) CHECK(v == 0.0);

    SpaceTimeField u(g, Rank::Vector);
    u.fill([&](int, int i, int, int) { return 3.0 * g.xcenter(0, i); });
    SpaceTimeField gu = discrete_gradient(u);
    for (int i = 1; i < g.cells[0] - 1; ++i) CHECK(gu.at(0, i) == 3.0);
  }

  SECTION("second order interior convergence") {
    auto err = [](int nx) {
      const GridSpec gg = make_grid_counts(1, 1, {1.0, 1.0}, 1.0, {nx, nx}, 8);
      SpaceTimeField u(gg, Rank::Vector);
      u.fill([&](int, int i, int, int) { return std::sin(2 * M_PI * gg.xcenter(0, i)); });
      SpaceTimeField gu = discrete_gradient(u);
      double e = 0.0;
      for (int i = 1; i < gg.cells[0] - 1; ++i)
        e = std::max(e, std::abs(gu.at(0, i) -
                                 2 * M_PI * std::cos(2 * M_PI * gg.xcenter(0, i))));
      return e;
    };
    const double ratio = err(16) / err(32);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }

  SECTION("rank mismatch rejected") {
    SpaceTimeField s(g, Rank::Scalar, 1.0);
    CHECK_THROWS(discrete_gradient(s));
  }
}

TEST_CASE("cylinder cells match the membership predicate") {
  const GridSpec g = unit_grid(2, 8, 16);
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    ParabolicCylinder c;
    c.x0 = rng.uniform(0.1, 0.9) + 1e-4;  // avoid exact cell-boundary radii
    c.x1 = rng.uniform(0.1, 0.9) + 1e-4;
    c.t = rng.uniform(0.2, 1.0);
    c.r = rng.uniform(g.h(0) / 2, 0.5) + 1e-5;
    c.orientation = rep % 2 ? CylOrientation::Backward : CylOrientation::Symmetric;
    long long count = 0;
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < g.cells[1]; ++j)
          if (cylinder_contains(g, c, m, i, j)) ++count;
    if (count == 0) {
      CHECK_THROWS(cylinder_cells(g, c));  // empty discretization rejected
    } else {
      auto cells = cylinder_cells(g, c);
      CHECK(count == static_cast<long long>(cells.size()));
    }
  }

  SECTION("anchor column for r = h/2") {
    ParabolicCylinder c;
    c.x0 = g.xcenter(0, 3);
    c.x1 = g.xcenter(1, 4);
    c.t = g.tcenter(7);
    c.r = g.h(0) / 2;
    auto cells = cylinder_cells(g, c);
    const long long depth =
        static_cast<long long>(std::ceil(c.r * c.r / g.tau() - 1e-12));
    CHECK(static_cast<long long>(cells.size()) == std::max(1ll, depth));
    for (auto& cell : cells) {
      CHECK(cell.i == 3);
      CHECK(cell.j == 4);
    }
  }

  SECTION("whole-domain radius catches all cells up to the anchor time") {
    ParabolicCylinder c;
    c.x0 = 0.5;
    c.x1 = 0.5;
    c.t = g.tcenter(g.steps - 1);
    c.r = 2.0;  // covers space and, squared, all of (0,T)
    auto cells = cylinder_cells(g, c);
    CHECK(static_cast<long long>(cells.size()) == g.total_cells());
  }
}

TEST_CASE("space-time extension") {
  const GridSpec g = unit_grid(1, 8, 8, 1);

  SECTION("zero extends to zero") {
    SpaceTimeField w(g, Rank::Vector), G(g, Rank::Matrix);
    auto ext = extend_spacetime(w, G);
    for (double v : ext.w.values()) CHECK(v == 0.0);
    CHECK(ext.ext.extended.steps == 4 * g.steps);
    CHECK(ext.ext.extended.cells[0] == 3 * g.cells[0]);
  }

  SECTION("even reflection of w, odd reflection of G") {
    SpaceTimeField w(g, Rank::Vector), G(g, Rank::Matrix);
    // w = t at a fixed interior x, zero at walls
    w.fill([&](int m, int i, int, int) { return i == 4 ? g.tcenter(m) : 0.0; });
    G.fill([&](int m, int i, int, int) { return i == 4 ? 1.0 + g.tcenter(m) : 0.0; });
    auto ext = extend_spacetime(w, G);
    const auto& e = ext.ext;
    // extended value at T + s equals value at T - s
    for (int m = 0; m < g.steps; ++m) {
      const int mi = e.time_offset + m;
      const int mr = e.time_offset + 2 * g.steps - 1 - m;
      CHECK(ext.w.at(mi, e.space_offset[0] + 4) == ext.w.at(mr, e.space_offset[0] + 4));
      CHECK(ext.G.at(mi, e.space_offset[0] + 4) == -ext.G.at(mr, e.space_offset[0] + 4));
    }
  }

  SECTION("measure doubling is exact") {
    Rng rng(3);
    SpaceTimeField w(g, Rank::Vector), G = random_field(g, Rank::Matrix, rng);
    // sin profile vanishes at the wall faces, so the trace gate passes
    w.fill([&](int m, int i, int, int) {
      return std::sin(M_PI * g.xcenter(0, i)) * (1.0 + g.tcenter(m));
    });
    auto ext = extend_spacetime(w, G);
    const double q = 1.7;
    const double ratioG = std::pow(lp_norm(ext.G, q) / lp_norm(G, q), q);
    CHECK(ratioG == Catch::Approx(2.0).epsilon(1e-13));

    SpaceTimeField go = discrete_gradient(w);
    SpaceTimeField ge = extended_gradient(ext.w, ext.ext);
    const double r2 = std::pow(lp_norm(ge, q) / lp_norm(go, q), q);
    CHECK(r2 == Catch::Approx(2.0).epsilon(1e-13));
  }

  SECTION("nonzero trace rejected") {
    SpaceTimeField w(g, Rank::Vector, 1.0), G(g, Rank::Matrix);
    CHECK_THROWS(extend_spacetime(w, G));
  }
}

TEST_CASE("field csv round trip") {
  const GridSpec g = unit_grid(2, 4, 4, 2);
  Rng rng(9);
  const SpaceTimeField f = random_field(g, Rank::Matrix, rng);
  std::stringstream ss;
  write_field_csv(f, ss);
  const SpaceTimeField r = read_field_csv(ss);
  CHECK(r.rank() == Rank::Matrix);
  REQUIRE(r.values().size() == f.values().size());
  for (size_t k = 0; k < f.values().size(); ++k) CHECK(r.values()[k] == f.values()[k]);
}
