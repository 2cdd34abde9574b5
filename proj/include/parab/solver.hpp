#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parab/field.hpp"
#include "parab/gradient.hpp"
#include "parab/law.hpp"
#include "parab/norms.hpp"

namespace parab {

struct ProblemData {
  SpaceTimeField f;       // matrix-valued forcing (-div f on the right)
  SpaceTimeField g;       // boundary lift, vector; empty grid = zero
  SpaceTimeField F;       // flux representing dt g = div F; empty = zero
  SpaceTimeField source;  // optional non-divergence source, vector; empty = zero
  std::vector<double> u0; // initial datum per (spatial cell, component); empty = zero
  bool has_g = false, has_F = false, has_source = false;

  static ProblemData forcing(SpaceTimeField f_) {
    ProblemData d;
    d.f = std::move(f_);
    return d;
  }
};

struct SolverConfig {
  double lin_tol = 1e-12;   // CG relative tolerance
  int lin_max = 50000;
  double picard_tol = 1e-11;
  int picard_max = 240;
  // relaxation of the frozen-coefficient step; 1/2 kills the two-cycle that
  // plain iteration develops across profile kinks, and the step is halved
  // further (down to 1/8) if increments ever grow
  double picard_damping = 0.5;

  void validate() const {
    if (!(lin_tol > 0.0) || !(picard_tol > 0.0))
      throw std::invalid_argument("solver: tolerances must be positive");
    if (!(picard_damping > 0.0 && picard_damping <= 1.0))
      throw std::invalid_argument("solver: damping must lie in (0,1]");
  }
};

struct IterationTrace {
  int picard_iters = 0;
  bool converged = true;
  std::vector<double> increments;

  // increments eventually decreasing (flag, not a failure)
  bool eventually_monotone() const {
    if (increments.size() < 3) return true;
    size_t start = increments.size() / 2;
    for (size_t k = start + 1; k < increments.size(); ++k)
      if (increments[k] > increments[k - 1] * (1.0 + 1e-9)) return false;
    return true;
  }
};

struct SolveResult {
  SpaceTimeField u;
  IterationTrace trace;
  double weak_residual = 0.0;  // tent-basis residual of the returned field
};

namespace sdetail {

// One implicit Euler step: ((vol/tau) I + K) x = rhs with the flux-form
// stiffness K built from the cellwise coefficient (face average, ghost
// mirroring at Dirichlet walls). Matrix-free CG with warm start.
class StepSolver {
public:
  StepSolver(const GridSpec& g, const std::vector<double>& comp_matrix)
      : g_(g), N_(g.ncomp), nx_(g.cells[0]), ny_(g.n == 2 ? g.cells[1] : 1), M_(comp_matrix) {
    vol_ = 1.0;
    for (int a = 0; a < g.n; ++a) vol_ *= g.h(a);
  }

  // coeff: cellwise scalar diffusion values for this time slice
  void apply(const std::vector<double>& coeff, const std::vector<double>& x,
             std::vector<double>& out) const {
    const double dtw = vol_ / g_.tau();
    out.assign(x.size(), 0.0);
    for (size_t k = 0; k < x.size(); ++k) out[k] = dtw * x[k];
    for (int axis = 0; axis < g_.n; ++axis) {
      const double w = vol_ / (g_.h(axis) * g_.h(axis));
      const int nA = axis == 0 ? nx_ : ny_;
      const bool periodic = g_.boundary[axis] == Boundary::Periodic;
      for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) {
          const int idx = axis == 0 ? i : j;
          const size_t me = cell(i, j);
          // one-sided accumulation over the two faces of this cell along axis
          for (int side = -1; side <= 1; side += 2) {
            int nb = idx + side;
            size_t other;
            bool ghost = false;
            if (nb < 0 || nb >= nA) {
              if (periodic) {
                nb = (nb + nA) % nA;
              } else {
                ghost = true;  // mirrored ghost: u_ghost = -u_me
              }
            }
            double aface;
            if (ghost) {
              other = me;
              aface = coeff[me];
            } else {
              other = axis == 0 ? cell(nb, j) : cell(i, nb);
              aface = 0.5 * (coeff[me] + coeff[other]);
            }
            auto uother = [&](int c2) { return ghost ? -x[dof(me, c2)] : x[dof(other, c2)]; };
            for (int c = 0; c < N_; ++c) {
              if (M_.empty()) {
                out[dof(me, c)] += w * aface * (x[dof(me, c)] - uother(c));
              } else {
                double acc = 0.0;
                for (int c2 = 0; c2 < N_; ++c2)
                  acc += M_[c * N_ + c2] * (x[dof(me, c2)] - uother(c2));
                out[dof(me, c)] += w * aface * acc;
              }
            }
          }
        }
    }
  }

  // CG with relative tolerance; x holds the warm start on entry
  int solve(const std::vector<double>& coeff, const std::vector<double>& rhs,
            std::vector<double>& x, double tol, int maxit) const {
    const size_t n = rhs.size();
    double b2 = 0.0;
    for (double v : rhs) b2 += v * v;
    if (b2 == 0.0) {
      x.assign(n, 0.0);
      return 0;
    }
    std::vector<double> r(n), p(n), Ap(n);
    apply(coeff, x, Ap);
    for (size_t k = 0; k < n; ++k) r[k] = rhs[k] - Ap[k];
    p = r;
    double r2 = 0.0;
    for (double v : r) r2 += v * v;
    const double stop = tol * tol * b2;
    int it = 0;
    while (r2 > stop && it < maxit) {
      apply(coeff, p, Ap);
      double pAp = 0.0;
      for (size_t k = 0; k < n; ++k) pAp += p[k] * Ap[k];
      if (pAp <= 0.0) break;
      const double alpha = r2 / pAp;
      for (size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * Ap[k];
      }
      double r2n = 0.0;
      for (double v : r) r2n += v * v;
      const double beta = r2n / r2;
      r2 = r2n;
      for (size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
      ++it;
    }
    return it;
  }

  size_t cell(int i, int j) const { return static_cast<size_t>(i) * ny_ + j; }
  size_t dof(size_t cellidx, int c) const { return cellidx * N_ + c; }
  double vol() const { return vol_; }

private:
  GridSpec g_;
  int N_, nx_, ny_;
  std::vector<double> M_;
  double vol_;
};

// -div f paired with the cell, times vol: face averages with zero ghosts at
// Dirichlet walls, wraparound for periodic axes
inline void add_div_forcing(const GridSpec& g, const SpaceTimeField& f, int m,
                            std::vector<double>& rhs, double sign) {
  const int N = g.ncomp;
  const int nx = g.cells[0], ny = g.n == 2 ? g.cells[1] : 1;
  double vol = 1.0;
  for (int a = 0; a < g.n; ++a) vol *= g.h(a);
  for (int axis = 0; axis < g.n; ++axis) {
    const double w = vol / g.h(axis);
    const int nA = axis == 0 ? nx : ny;
    const bool periodic = g.boundary[axis] == Boundary::Periodic;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const int idx = axis == 0 ? i : j;
        for (int c = 0; c < N; ++c) {
          auto fval = [&](int k) -> double {
            if (k < 0 || k >= nA) {
              if (periodic) k = (k + nA) % nA;
              else return 0.0;  // zero extension outside Dirichlet walls
            }
            return axis == 0 ? f.at(m, k, j, axis * N + c) : f.at(m, i, k, axis * N + c);
          };
          const double cur = fval(idx);
          const double fplus = 0.5 * (cur + fval(idx + 1));
          const double fminus = 0.5 * (fval(idx - 1) + cur);
          rhs[(static_cast<size_t>(i) * ny + j) * N + c] += sign * (-(fplus - fminus)) * w;
        }
      }
  }
}

}  // namespace sdetail

// quadratic B-spline bump used for the tent-basis weak residual
inline double bspline2(double s) {
  const double a = std::abs(s);
  if (a >= 1.5) return 0.0;
  if (a <= 0.5) return 0.75 - s * s;
  return 0.5 * (1.5 - a) * (1.5 - a);
}
inline double bspline2_d(double s) {
  const double a = std::abs(s);
  if (a >= 1.5) return 0.0;
  if (a <= 0.5) return -2.0 * s;
  return s > 0 ? -(1.5 - a) : (1.5 - a);
}

// Discrete weak-form residual of the pair (w, G): max over interior C^1 tent
// test functions phi of |sum (w . dt phi - G . grad phi) vol| / vol. The
// solver's own outputs and the truncation input gate are measured in this
// same metric.
inline double pair_weak_residual(const SpaceTimeField& w, const SpaceTimeField& G) {
  const GridSpec& g = w.grid();
  const int N = g.ncomp;
  const int nx = g.cells[0], ny = g.n == 2 ? g.cells[1] : 1;
  const double vol = g.cell_volume();
  double worst = 0.0;
  for (int m0 = 1; m0 + 1 < g.steps; ++m0)
    for (int i0 = 1; i0 + 1 < nx; ++i0)
      for (int j0 = (g.n == 2 ? 1 : 0); j0 + 1 < (g.n == 2 ? ny : 2); ++j0) {
        double acc = 0.0;
        for (int dm = -1; dm <= 1; ++dm)
          for (int di = -1; di <= 1; ++di)
            for (int dj = (g.n == 2 ? -1 : 0); dj <= (g.n == 2 ? 1 : 0); ++dj) {
              const int m = m0 + dm, i = i0 + di, j = g.n == 2 ? j0 + dj : 0;
              const double bx = bspline2(di), by = g.n == 2 ? bspline2(dj) : 1.0;
              const double bt = bspline2(dm);
              const double dphit = bspline2_d(dm) / g.tau() * bx * by;
              for (int c = 0; c < N; ++c) {
                acc += w.at(m, i, j, c) * dphit * vol;
                const double dphix = bspline2_d(di) / g.h(0) * bt * by;
                acc -= G.at(m, i, j, 0 * N + c) * dphix * vol;
                if (g.n == 2) {
                  const double dphiy = bspline2_d(dj) / g.h(1) * bt * bx;
                  acc -= G.at(m, i, j, 1 * N + c) * dphiy * vol;
                }
              }
            }
        worst = std::max(worst, std::abs(acc));
      }
  return worst / vol;
}

// weak-form residual of a solution u of dt u - div(a grad u) = -div f (+S):
// measured through the pair (w, G) = (u, a grad u - f)
inline double weak_form_residual(const SpaceTimeField& u, const LinearTensor& tensor,
                                 const SpaceTimeField& f) {
  const GridSpec& g = u.grid();
  SpaceTimeField G = discrete_gradient(u);
  const int N = g.ncomp, ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        const double a = tensor.coeff.at(m, i, j);
        for (int c = 0; c < g.n * N; ++c)
          G.at(m, i, j, c) = a * G.at(m, i, j, c) - f.at(m, i, j, c);
      }
  return pair_weak_residual(u, G);
}

// Implicit Euler solve of dt u - div(a grad u) = -div f + S, homogeneous
// Dirichlet/periodic walls, initial datum from data.u0. The coefficient may
// vary per cell and time slice.
inline SpaceTimeField solve_linear_core(const LinearTensor& tensor, const ProblemData& data,
                                        const SolverConfig& cfg) {
  cfg.validate();
  const GridSpec& g = data.f.grid();
  if (!tensor.coeff.grid().same_layout(g)) throw std::invalid_argument("solver: grid mismatch");
  const int N = g.ncomp;
  const int nx = g.cells[0], ny = g.n == 2 ? g.cells[1] : 1;
  const size_t dofs = static_cast<size_t>(nx) * ny * N;
  sdetail::StepSolver step(g, {});
  SpaceTimeField u(g, Rank::Vector);

  std::vector<double> prev(dofs, 0.0);
  if (!data.u0.empty()) {
    if (data.u0.size() != dofs) throw std::invalid_argument("solver: initial datum size");
    prev = data.u0;
  }
  std::vector<double> x = prev, rhs(dofs), coeff(static_cast<size_t>(nx) * ny);

  const double vol = step.vol();
  for (int m = 0; m < g.steps; ++m) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) coeff[step.cell(i, j)] = tensor.coeff.at(m, i, j);
    for (size_t k = 0; k < dofs; ++k) rhs[k] = prev[k] * vol / g.tau();
    sdetail::add_div_forcing(g, data.f, m, rhs, 1.0);
    if (data.has_source)
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
          for (int c = 0; c < N; ++c)
            rhs[step.dof(step.cell(i, j), c)] += data.source.at(m, i, j, c) * vol;
    step.solve(coeff, rhs, x, cfg.lin_tol, cfg.lin_max);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int c = 0; c < N; ++c) u.at(m, i, j, c) = x[step.dof(step.cell(i, j), c)];
    prev = x;
  }
  return u;
}

// Linear system with possibly inhomogeneous data (g, F): substitute
// v = u - g, solve for v with forcing f + F - a grad g, return u = v + g.
inline SolveResult solve_linear(const LinearTensor& tensor, const ProblemData& data,
                                const SolverConfig& cfg) {
  SolveResult res;
  if (!data.has_g) {
    res.u = solve_linear_core(tensor, data, cfg);
    res.weak_residual = weak_form_residual(res.u, tensor, data.f);
    res.trace.picard_iters = 1;
    return res;
  }
  const GridSpec& g = data.f.grid();
  const int N = g.ncomp, ny = g.n == 2 ? g.cells[1] : 1;
  SpaceTimeField gg = data.g;
  SpaceTimeField gradg = discrete_gradient(gg);
  ProblemData hom;
  hom.f = data.f;
  hom.has_source = data.has_source;
  hom.source = data.source;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j) {
        const double a = tensor.coeff.at(m, i, j);
        for (int c = 0; c < g.n * N; ++c) {
          double v = data.f.at(m, i, j, c) - a * gradg.at(m, i, j, c);
          if (data.has_F) v += data.F.at(m, i, j, c);
          hom.f.at(m, i, j, c) = v;
        }
      }
  if (!data.u0.empty()) {
    hom.u0 = data.u0;
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        for (int c = 0; c < N; ++c)
          hom.u0[(static_cast<size_t>(i) * ny + j) * N + c] -= gg.at(0, i, j, c);
  }
  SpaceTimeField v = solve_linear_core(tensor, hom, cfg);
  // weak residual of (u - g, a grad u - f - F) for the inhomogeneous form
  {
    SpaceTimeField u = v;
    u += gg;
    SpaceTimeField G = discrete_gradient(u);
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          const double a = tensor.coeff.at(m, i, j);
          for (int c = 0; c < g.n * N; ++c) {
            double val = a * G.at(m, i, j, c) - data.f.at(m, i, j, c);
            if (data.has_F) val -= data.F.at(m, i, j, c);
            G.at(m, i, j, c) = val;
          }
        }
    res.weak_residual = pair_weak_residual(v, G);
    res.u = std::move(u);
  }
  res.trace.picard_iters = 1;
  return res;
}

// Picard iteration with frozen coefficient nu(|grad u|) for
// dt u - div A(z; grad u) = -div f. Shift chooses the argument of A:
// A(grad u - shift) for the inhomogeneous lift, A(grad u + shift) with
// sign = +1 for the measure lift.
struct NonlinearOptions {
  const SpaceTimeField* shift = nullptr;  // matrix field added to grad u inside A
  double shift_sign = 0.0;
  SpaceTimeField initial;  // optional Picard start
  bool has_initial = false;
};

inline SolveResult solve_nonlinear(const NonlinearLaw& law, const ProblemData& data,
                                   const SolverConfig& cfg, NonlinearOptions opt = {}) {
  cfg.validate();
  const GridSpec& g = data.f.grid();
  const int N = g.ncomp, ny = g.n == 2 ? g.cells[1] : 1;
  SolveResult res;

  SpaceTimeField u = opt.has_initial ? opt.initial : SpaceTimeField(g, Rank::Vector);
  LinearTensor tensor = LinearTensor::constant(g, law.picard_coeff(0.0));
  double theta = law.is_linear() ? 1.0 : cfg.picard_damping;

  const int iters = law.is_linear() ? 1 : cfg.picard_max;
  for (int it = 0; it < iters; ++it) {
    // freeze the coefficient from the current iterate
    SpaceTimeField grad = discrete_gradient(u);
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          double s2 = 0.0;
          for (int c = 0; c < g.n * N; ++c) {
            double v = grad.at(m, i, j, c);
            if (opt.shift) v += opt.shift_sign * opt.shift->at(m, i, j, c);
            s2 += v * v;
          }
          tensor.coeff.at(m, i, j) = law.picard_coeff(std::sqrt(s2));
        }
    // effective forcing: f - sign * nu_hat * shift
    ProblemData eff;
    eff.f = data.f;
    eff.has_source = data.has_source;
    eff.source = data.source;
    if (opt.shift) {
      for (int m = 0; m < g.steps; ++m)
        for (int i = 0; i < g.cells[0]; ++i)
          for (int j = 0; j < ny; ++j) {
            const double a = tensor.coeff.at(m, i, j);
            for (int c = 0; c < g.n * N; ++c)
              eff.f.at(m, i, j, c) -= opt.shift_sign * a * opt.shift->at(m, i, j, c);
          }
    }
    eff.u0 = data.u0;
    SpaceTimeField unew = solve_linear_core(tensor, eff, cfg);
    if (theta < 1.0) {
      for (size_t k = 0; k < unew.values().size(); ++k)
        unew.values()[k] = theta * unew.values()[k] + (1.0 - theta) * u.values()[k];
    }
    SpaceTimeField diff = unew;
    diff -= u;
    const double inc = lp_norm(diff, 2.0);
    const double scale = std::max(lp_norm(unew, 2.0), 1e-300);
    const double rel = inc / scale;
    if (!res.trace.increments.empty() && rel > res.trace.increments.back())
      theta = std::max(theta * 0.5, 0.125);
    res.trace.increments.push_back(rel);
    u = std::move(unew);
    res.trace.picard_iters = it + 1;
    if (law.is_linear() || rel <= cfg.picard_tol) break;
  }
  res.trace.converged =
      law.is_linear() || res.trace.increments.empty() ||
      res.trace.increments.back() <= cfg.picard_tol;
  // weak residual through the pair (u, A(grad u +- shift) - f)
  {
    SpaceTimeField G = discrete_gradient(u);
    std::vector<double> Q(g.n * N), AQ;
    for (int m = 0; m < g.steps; ++m)
      for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < ny; ++j) {
          for (int c = 0; c < g.n * N; ++c) {
            Q[c] = G.at(m, i, j, c);
            if (opt.shift) Q[c] += opt.shift_sign * opt.shift->at(m, i, j, c);
          }
          law.apply(Q, AQ);
          for (int c = 0; c < g.n * N; ++c)
            G.at(m, i, j, c) = AQ[c] - data.f.at(m, i, j, c);
        }
    res.weak_residual = pair_weak_residual(u, G);
  }
  res.u = std::move(u);
  return res;
}

// f^k = f chi_{|f| < k} (strict inequality, Frobenius magnitude)
inline SpaceTimeField truncate_forcing(const SpaceTimeField& f, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate_forcing: k must be positive");
  const GridSpec& g = f.grid();
  SpaceTimeField out = f;
  const int ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        if (!(f.magnitude(m, i, j) < k))
          for (int c = 0; c < f.components(); ++c) out.at(m, i, j, c) = 0.0;
  return out;
}

// representation residual of dt g = div F in the tent metric
inline double representation_residual(const SpaceTimeField& g_lift, const SpaceTimeField& F) {
  return pair_weak_residual(g_lift, F);
}

// Inhomogeneous nonlinear problem via the shift v = u - g: v solves
// dt v - div A(grad v + (grad g)^k) = -div(f + F), u = v + g. (The law sees
// grad u = grad v + grad g; with that orientation the pure-lift data
// (g, F = A grad g, f = 0) reproduces u = g exactly.)
inline SolveResult lift_inhomogeneous(const NonlinearLaw& law, const SpaceTimeField& g_lift,
                                      const SpaceTimeField& F, const SpaceTimeField& f,
                                      const SolverConfig& cfg,
                                      double grad_trunc = std::numeric_limits<double>::infinity(),
                                      double rep_tol = 1.0) {
  const GridSpec& g = f.grid();
  const double rep = representation_residual(g_lift, F);
  if (!(rep <= rep_tol))
    throw std::invalid_argument("lift: representation residual " + std::to_string(rep));
  SpaceTimeField gradg = discrete_gradient(g_lift);
  if (std::isfinite(grad_trunc)) gradg = truncate_forcing(gradg, grad_trunc);

  ProblemData data;
  data.f = f;
  const int N = g.ncomp, ny = g.n == 2 ? g.cells[1] : 1;
  for (int m = 0; m < g.steps; ++m)
    for (int i = 0; i < g.cells[0]; ++i)
      for (int j = 0; j < ny; ++j)
        for (int c = 0; c < g.n * N; ++c) data.f.at(m, i, j, c) += F.at(m, i, j, c);

  NonlinearOptions opt;
  opt.shift = &gradg;
  opt.shift_sign = 1.0;
  SolveResult res = solve_nonlinear(law, data, cfg, opt);
  res.u += g_lift;
  return res;
}

// Mollified-measure problem dt u - div A(grad u) = mu: heat lift h per
// component, then w = u - h solves the shifted system with forcing
// (1 - nu_hat) grad h.
inline SolveResult measure_rhs_demo(const NonlinearLaw& law, const SpaceTimeField& mu,
                                    const SolverConfig& cfg) {
  const GridSpec& g = mu.grid();
  ProblemData heat;
  heat.f = SpaceTimeField(g, Rank::Matrix);
  heat.source = mu;
  heat.has_source = true;
  LinearTensor id = LinearTensor::constant(g, 1.0);
  SpaceTimeField h = solve_linear_core(id, heat, cfg);
  SpaceTimeField gradh = discrete_gradient(h);

  ProblemData data;
  data.f = gradh;  // -div(grad h) on the right for the w problem
  NonlinearOptions opt;
  opt.shift = &gradh;
  opt.shift_sign = 1.0;
  SolveResult res = solve_nonlinear(law, data, cfg, opt);
  res.u += h;
  return res;
}

}  // namespace parab
