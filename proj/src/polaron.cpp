#include "usc/polaron.hpp"

#include <cmath>

#include "usc/errors.hpp"

namespace usc {

namespace {

double renormalized(const ModeGrid& grid, double delta, double x) {
  double s = 0.0;
  for (int i = 0; i < grid.n_modes; ++i) {
    double den = grid.omegas(i) + x;
    if (!(den > 0.0)) throw Error(ErrorKind::Domain, "omega_k + gap must be positive");
    double f = grid.g(i) / den;
    s += f * f;
  }
  return delta * std::exp(-2.0 * s);
}

double bisect(const ModeGrid& grid, double delta, double tol, int max_iter, int& iters) {
  // r(x) = x - delta e^{-2 sum f^2} changes sign on (0, delta]
  double lo = 0.0, hi = delta;
  double tiny = delta * 1e-300;
  if (grid.omegas.minCoeff() <= 0.0) lo = tiny;
  while (hi - lo > tol * delta && iters < max_iter) {
    double mid = 0.5 * (lo + hi);
    double r = mid - renormalized(grid, delta, std::max(mid, tiny));
    if (r > 0.0) hi = mid; else lo = mid;
    ++iters;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PolaronParams polaron_at(const ModeGrid& grid, double delta, double delta_tilde) {
  PolaronParams p;
  p.delta = delta;
  p.delta_tilde = delta_tilde;
  p.delta0 = 2.0 * delta_tilde;
  p.f.resize(grid.n_modes);
  double th2 = 0.0, e0 = 0.0;
  for (int i = 0; i < grid.n_modes; ++i) {
    double w = grid.omegas(i);
    if (!(w + delta_tilde > 0.0)) throw Error(ErrorKind::Domain, "omega_k + gap must be positive");
    double f = grid.g(i) / (w + delta_tilde);
    p.f(i) = f;
    th2 += f * f;
    e0 += w * f * f - 2.0 * grid.g(i) * f;
  }
  p.theta = std::sqrt(th2);
  p.e0 = e0;
  p.residual = std::abs(delta_tilde - delta * std::exp(-2.0 * th2));
  return p;
}

PolaronParams solve_polaron(const ModeGrid& grid, double delta, const PolaronOptions& opt) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Parameter, "delta must be positive");
  if (!(opt.tol > 0.0)) throw Error(ErrorKind::Parameter, "tol must be positive");
  if (opt.max_iter < 1) throw Error(ErrorKind::Parameter, "max_iter must be >= 1");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0))
    throw Error(ErrorKind::Parameter, "damping must be in (0, 1]");
  if (grid.alpha > kAlphaMax) throw Error(ErrorKind::Parameter, "alpha must be in [0, 0.49]");

  double x = opt.initial.value_or(delta);
  if (!(x > 0.0)) throw Error(ErrorKind::Parameter, "initial gap must be positive");

  double lam = opt.damping;
  double step = 0.0, prev_step = 0.0;
  int flips = 0, iters = 0;
  bool done = false, bisected = false;
  while (iters < opt.max_iter) {
    double target = renormalized(grid, delta, x);
    double next = (1.0 - lam) * x + lam * target;
    step = next - x;
    x = next;
    ++iters;
    if (std::abs(step) < opt.tol * delta) {
      done = true;
      break;
    }
    // sustained sign alternation without contraction means the damped map is not settling
    if (prev_step != 0.0 && step * prev_step < 0.0 && std::abs(step) > 0.9 * std::abs(prev_step)) {
      if (++flips > 20) {
        x = bisect(grid, delta, opt.tol, opt.max_iter, iters);
        bisected = true;
        done = true;
        break;
      }
    } else {
      flips = 0;
    }
    prev_step = step;
  }

  PolaronParams p = polaron_at(grid, delta, x);
  p.iterations = iters;
  p.used_bisection = bisected;
  if (bisected) done = p.residual < 10.0 * opt.tol * delta;
  p.converged = done;
  if (!done)
    throw Error(ErrorKind::Convergence, "polaron fixed point did not converge", std::abs(step));
  if (grid.alpha > kAlphaWarn) p.warnings.push_back("alpha above 0.3: outside the validated range");
  return p;
}

}  // namespace usc
