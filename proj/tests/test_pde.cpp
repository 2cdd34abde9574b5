#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "parab/law.hpp"
#include "parab/norms.hpp"
#include "parab/rng.hpp"
#include "parab/solver.hpp"

using namespace parab;

namespace {

GridSpec heat_grid(int nx, double T, int nt) {
  return make_grid_counts(1, 1, {1.0, 1.0}, T, {nx, nx}, nt);
}

// initial datum sin(pi x); exact solution sin(pi x) e^{-pi^2 t}
ProblemData heat_problem(const GridSpec& g) {
  ProblemData d;
  d.f = SpaceTimeField(g, Rank::Matrix);
  d.u0.assign(static_cast<size_t>(g.spatial_cells()) * g.ncomp, 0.0);
  for (int i = 0; i < g.cells[0]; ++i) d.u0[i] = std::sin(M_PI * g.xcenter(0, i));
  return d;
}

double manufactured_grad_error(int nx) {
  const double h = 1.0 / nx;
  const double tau = h * h;
  const double T = 0.0625;
  const GridSpec g = make_grid_counts(1, 1, {1.0, 1.0}, T, {nx, nx},
                                      static_cast<int>(T / tau + 0.5));
  LinearTensor id = LinearTensor::constant(g, 1.0);
  SolverConfig cfg;
  SolveResult r = solve_linear(id, heat_problem(g), cfg);
  double err2 = 0.0;
  SpaceTimeField gu = discrete_gradient(r.u);
  for (int m = 0; m < g.steps; ++m)
    for (int i = 1; i + 1 < g.cells[0]; ++i) {
      const double exact =
          M_PI * std::cos(M_PI * g.xcenter(0, i)) * std::exp(-M_PI * M_PI * g.tcenter(m));
      err2 += std::pow(gu.at(m, i) - exact, 2) * g.cell_volume();
    }
  return std::sqrt(err2);
}

}  // namespace

TEST_CASE("linear solver trivia") {
  const GridSpec g = heat_grid(16, 1.0, 16);
  LinearTensor id = LinearTensor::constant(g, 1.0);
  SolverConfig cfg;

  SECTION("zero data gives the zero solution exactly") {
    ProblemData d;
    d.f = SpaceTimeField(g, Rank::Matrix);
    SolveResult r = solve_linear(id, d, cfg);
    for (double v : r.u.values()) CHECK(v == 0.0);
    CHECK(r.weak_residual == 0.0);
  }

  SECTION("scaling by powers of two is bitwise exact") {
    Rng rng(71);
    ProblemData d;
    d.f = random_field(g, Rank::Matrix, rng);
    SolveResult r1 = solve_linear(id, d, cfg);
    ProblemData d2;
    d2.f = scaled(d.f, 8.0);
    SolveResult r2 = solve_linear(id, d2, cfg);
    for (size_t k = 0; k < r1.u.values().size(); ++k)
      CHECK(r2.u.values()[k] == 8.0 * r1.u.values()[k]);
  }

  SECTION("additivity at solver tolerance") {
    Rng rng(72);
    ProblemData da, db, dsum;
    da.f = random_field(g, Rank::Matrix, rng);
    db.f = random_field(g, Rank::Matrix, rng);
    dsum.f = da.f;
    dsum.f += db.f;
    SolveResult ra = solve_linear(id, da, cfg);
    SolveResult rb = solve_linear(id, db, cfg);
    SolveResult rs = solve_linear(id, dsum, cfg);
    SpaceTimeField combo = ra.u;
    combo += rb.u;
    combo -= rs.u;
    CHECK(lp_norm(combo, 2.0) <= 1e-9 * (lp_norm(rs.u, 2.0) + 1e-30));
  }

  SECTION("ellipticity spot check") {
    Rng rng(73);
    CHECK(id.spot_check(rng));
    CHECK_THROWS(LinearTensor::from_field(SpaceTimeField(g, Rank::Scalar, 0.0)));
  }
}

TEST_CASE("manufactured heat solution converges at second order") {
  const double e16 = manufactured_grad_error(16);
  const double e32 = manufactured_grad_error(32);
  const double e64 = manufactured_grad_error(64);
  const double r1 = e16 / e32, r2 = e32 / e64;
  INFO("errors " << e16 << " " << e32 << " " << e64 << " ratios " << r1 << " " << r2);
  CHECK(r1 > 3.0);
  CHECK(r1 < 5.0);
  CHECK(r2 > 3.0);
  CHECK(r2 < 5.0);
}

TEST_CASE("weak-form residual of solver outputs is small") {
  // the tent-metric residual is a consistency-order quantity: bounded at
  // desk scale and shrinking under joint (h, tau) refinement
  auto resid = [](int nx, int nt) {
    const GridSpec g = heat_grid(nx, 0.0625, nt);
    LinearTensor id = LinearTensor::constant(g, 1.0);
    SolverConfig cfg;
    return solve_linear(id, heat_problem(g), cfg).weak_residual;
  };
  const double ra = resid(32, 64), rb = resid(64, 256);
  INFO("residuals " << ra << " " << rb);
  CHECK(ra < 0.5);
  CHECK(rb < ra / 1.4);
}

TEST_CASE("nonlinear solver") {
  const GridSpec g = heat_grid(16, 0.5, 16);
  SolverConfig cfg;

  SECTION("constant profile equals the linear solve in one iteration") {
    Rng rng(74);
    ProblemData d;
    d.f = random_field(g, Rank::Matrix, rng);
    NonlinearLaw lin = NonlinearLaw::linear(1.0);
    SolveResult rn = solve_nonlinear(lin, d, cfg);
    CHECK(rn.trace.picard_iters == 1);
    LinearTensor id = LinearTensor::constant(g, 1.0);
    SolveResult rl = solve_linear(id, d, cfg);
    for (size_t k = 0; k < rn.u.values().size(); ++k)
      CHECK(rn.u.values()[k] == rl.u.values()[k]);
  }

  SECTION("max-power profile with zero forcing stays zero") {
    ProblemData d;
    d.f = SpaceTimeField(g, Rank::Matrix);
    NonlinearLaw law = NonlinearLaw::max_power(1.5, 1.0);
    SolveResult r = solve_nonlinear(law, d, cfg);
    for (double v : r.u.values()) CHECK(v == 0.0);
  }

  SECTION("min-power law converges and flags are consistent") {
    Rng rng(75);
    ProblemData d;
    d.f = random_field(g, Rank::Matrix, rng, -2.0, 2.0);
    NonlinearLaw law = NonlinearLaw::min_power(3.0, 1.0);
    SolveResult r = solve_nonlinear(law, d, cfg);
    INFO("iters " << r.trace.picard_iters << " monotone " << r.trace.eventually_monotone());
    CHECK(r.trace.converged);
    CHECK(r.trace.picard_iters >= 2);
    CHECK(r.trace.increments.back() <= cfg.picard_tol);
  }
}

TEST_CASE("law validation") {
  Rng rng(76);
  SECTION("admissible profiles pass") {
    for (auto law : {NonlinearLaw::linear(1.0), NonlinearLaw::min_power(3.0, 1.0),
                     NonlinearLaw::min_power(2.5, 1.0), NonlinearLaw::max_power(1.5, 1.0)}) {
      LawValidation v = validate_law(law, 2, rng, 4000);
      CHECK(v.growth);
      CHECK(v.monotone);
      CHECK(v.linear_at_infinity);
      CHECK(v.jac_modulus.back() <= 1e-5);
    }
  }
}

TEST_CASE("forcing truncation") {
  const GridSpec g = heat_grid(8, 1.0, 8);
  Rng rng(77);

  SECTION("large threshold is the identity bitwise") {
    SpaceTimeField f = random_field(g, Rank::Matrix, rng);
    SpaceTimeField fk = truncate_forcing(f, 1e9);
    for (size_t k = 0; k < f.values().size(); ++k) CHECK(fk.values()[k] == f.values()[k]);
  }

  SECTION("strict inequality at the threshold") {
    SpaceTimeField f(g, Rank::Matrix, 0.0);
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i) f.at(m, i, 0, 0) = 5.0;
    SpaceTimeField fk = truncate_forcing(f, 5.0);
    for (double v : fk.values()) CHECK(v == 0.0);
    SpaceTimeField f3 = truncate_forcing(f, 5.0 + 1e-9);
    CHECK(f3.at(0, 0, 0, 0) == 5.0);
  }

  SECTION("monotone approach in k") {
    SpaceTimeField f = random_field(g, Rank::Matrix, rng, -3.0, 3.0);
    double prev = 1e300;
    for (double k : {0.5, 1.0, 2.0, 4.0}) {
      SpaceTimeField diff = f;
      diff -= truncate_forcing(f, k);
      const double gap = lp_norm(diff, 2.0);
      CHECK(gap <= prev + 1e-15);
      prev = gap;
    }
    CHECK(prev == 0.0);  // k = 4 exceeds the max magnitude 3
  }
}

TEST_CASE("inhomogeneous lift") {
  const GridSpec g = heat_grid(16, 0.25, 32);
  SolverConfig cfg;

  // g = discrete heat flow from sin(pi x); F = grad g satisfies the
  // representation identity up to consistency error
  LinearTensor id = LinearTensor::constant(g, 1.0);
  SolveResult gres = solve_linear(id, heat_problem(g), cfg);
  SpaceTimeField glift = gres.u;
  SpaceTimeField F = discrete_gradient(glift);

  SECTION("linear law reproduces the lift") {
    SpaceTimeField f(g, Rank::Matrix);
    NonlinearLaw law = NonlinearLaw::linear(1.0);
    SolveResult r = lift_inhomogeneous(law, glift, F, f, cfg);
    SpaceTimeField diff = r.u;
    diff -= glift;
    CHECK(lp_norm(diff, 2.0) <= 1e-10 * std::max(1.0, lp_norm(glift, 2.0)));
  }

  SECTION("zero lift reduces to the homogeneous solve") {
    Rng rng(78);
    SpaceTimeField f = random_field(g, Rank::Matrix, rng);
    SpaceTimeField zg(g, Rank::Vector), zF(g, Rank::Matrix);
    NonlinearLaw law = NonlinearLaw::min_power(3.0, 1.0);
    SolveResult a = lift_inhomogeneous(law, zg, zF, f, cfg);
    SolveResult b = solve_nonlinear(law, ProblemData::forcing(f), cfg);
    SpaceTimeField diff = a.u;
    diff -= b.u;
    CHECK(lp_norm(diff, 2.0) <= 1e-11);
  }

  SECTION("broken representation rejected") {
    Rng rng(79);
    SpaceTimeField f(g, Rank::Matrix);
    SpaceTimeField badF = random_field(g, Rank::Matrix, rng, -5.0, 5.0);
    NonlinearLaw law = NonlinearLaw::linear(1.0);
    CHECK_THROWS(lift_inhomogeneous(law, glift, badF, f, cfg, 1e300, 1e-3));
  }
}

TEST_CASE("measure right-hand side demo") {
  const GridSpec g = heat_grid(16, 0.25, 32);
  SolverConfig cfg;

  SECTION("zero measure gives zero") {
    SpaceTimeField mu(g, Rank::Vector);
    NonlinearLaw law = NonlinearLaw::min_power(3.0, 1.0);
    SolveResult r = measure_rhs_demo(law, mu, cfg);
    for (double v : r.u.values()) CHECK(v == 0.0);
  }

  SECTION("linear law equals the heat lift") {
    SpaceTimeField mu = mollified_point_mass(g, 0.5, 0.5, 0.125, 0.15, Rank::Vector);
    NonlinearLaw law = NonlinearLaw::linear(1.0);
    SolveResult r = measure_rhs_demo(law, mu, cfg);
    ProblemData heat;
    heat.f = SpaceTimeField(g, Rank::Matrix);
    heat.source = mu;
    heat.has_source = true;
    LinearTensor id = LinearTensor::constant(g, 1.0);
    SpaceTimeField h = solve_linear_core(id, heat, cfg);
    SpaceTimeField diff = r.u;
    diff -= h;
    CHECK(lp_norm(diff, 2.0) <= 1e-10 * std::max(1.0, lp_norm(h, 2.0)));
  }
}
