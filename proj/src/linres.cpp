#include "usc/linres.hpp"

#include <cmath>

#include "usc/errors.hpp"

namespace usc {

namespace {

cplx checked_h(cplx z, const SelfEnergyModel& s) {
  cplx h = h_denominator(z, s);
  if (h == 0.0 || !std::isfinite(std::abs(h)))
    throw Error(ErrorKind::Singularity, "h(z) vanishes or is not finite", std::abs(h));
  return h;
}

}  // namespace

cplx h_denominator(cplx z, cplx sigma, double dt) { return (z - dt) - chi(z, dt) * sigma; }

Eigen::Matrix2cd u1(double d0) {
  Eigen::Matrix2cd u;
  u << 0.0, d0, d0, d0;
  return u;
}

Eigen::Matrix2cd pi1(cplx z, cplx sigma, double dt) {
  double d0 = 2.0 * dt;
  Eigen::Matrix2cd p = Eigen::Matrix2cd::Zero();
  p(0, 0) = 1.0 / (z - dt);
  p(1, 1) = sigma / (d0 * d0);
  return p;
}

Eigen::Matrix2cd t_matrix_1(cplx z, const SelfEnergyModel& s) {
  double dt = s.delta_tilde(), d0 = s.delta0();
  cplx sig = s(z);
  cplx h = h_denominator(z, sig, dt);
  if (h == 0.0 || !std::isfinite(std::abs(h)))
    throw Error(ErrorKind::Singularity, "T1 evaluated at a zero of h", std::abs(h));
  Eigen::Matrix2cd t;
  t << (z - dt) * sig, d0 * (z - dt), d0 * (z - dt), d0 * d0 * chi(z, dt);
  return t / h;
}

Eigen::Matrix2cd t_matrix_1_series(cplx z, const SelfEnergyModel& s, int terms) {
  Eigen::Matrix2cd u = u1(s.delta0());
  Eigen::Matrix2cd pu = pi1(z, s(z), s.delta_tilde()) * u;
  Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
  Eigen::Matrix2cd pw = Eigen::Matrix2cd::Identity();
  for (int n = 0; n < terms; ++n) {
    acc += pw;
    pw = pw * pu;
  }
  return u * acc;
}

GreenBF green_bf(cplx z, const SelfEnergyModel& s) {
  double dt = s.delta_tilde(), d0 = s.delta0();
  cplx sig = s(z);
  cplx h = h_denominator(z, sig, dt);
  return {(1.0 - sig / d0) / h, sig / (d0 * h), (z - dt) * sig / (d0 * d0 * h)};
}

Eigen::Matrix2cd green_bf_dyson(cplx z, const SelfEnergyModel& s) {
  Eigen::Matrix2cd g0 = pi1(z, s(z), s.delta_tilde());
  return g0 + g0 * t_matrix_1(z, s) * g0;
}

cplx green1(G1 el, cplx z, const SelfEnergyModel& s, const PolaronParams& params, const ModeGrid& grid,
            int k, int p) {
  double d0 = s.delta0();
  cplx sig = s(z);
  cplx h = h_denominator(z, sig, s.delta_tilde());
  if (h == 0.0 || !std::isfinite(std::abs(h)))
    throw Error(ErrorKind::Singularity, "Green's function at a zero of h", std::abs(h));
  auto need = [&](int i) {
    if (i < 0 || i >= grid.n_modes) throw Error(ErrorKind::Parameter, "mode index out of range");
  };
  switch (el) {
    case G1::bb:
      return (1.0 - sig / d0) / h;
    case G1::bF:
    case G1::Fb:
      return sig / (d0 * h);
    case G1::FF:
      return (z - s.delta_tilde()) * sig / (d0 * d0 * h);
    case G1::bA:
    case G1::Ab:
      need(k);
      return d0 * params.f(k) / ((z - grid.omegas(k)) * h);
    case G1::AA: {
      need(k);
      need(p);
      cplx free = p == k ? 1.0 / (z - grid.omegas(k)) : cplx(0.0);
      return free + d0 * params.f(p) * d0 * params.f(k) * chi(z, s.delta_tilde()) /
                        ((z - grid.omegas(p)) * (z - grid.omegas(k)) * h);
    }
  }
  return 0.0;
}

cplx chiral_phase(int k, const PolaronParams&, const ModeGrid& grid, const SelfEnergyModel& s) {
  if (k < 0 || k >= grid.n_modes) throw Error(ErrorKind::Parameter, "mode index out of range");
  cplx h = checked_h(cplx(grid.omegas(k), 0.0), s);
  return std::conj(h) / h;
}

void transmission_reflection(ScatterResult1& res) {
  res.t = (res.s.array() + 1.0) * 0.5;
  res.r = (res.s.array() - 1.0) * 0.5;
}

ScatterResult1 scatter1(const PolaronParams& params, const ModeGrid& grid, const SelfEnergyModel& s) {
  ScatterResult1 res;
  res.omegas = grid.omegas;
  res.s.resize(grid.n_modes);
  res.sigma.resize(grid.n_modes);
  for (int k = 0; k < grid.n_modes; ++k) {
    res.sigma(k) = s(cplx(grid.omegas(k), 0.0));
    res.s(k) = chiral_phase(k, params, grid, s);
  }
  transmission_reflection(res);
  return res;
}

double find_resonance(const SelfEnergyModel& s, double lo, double hi) {
  auto f = [&](double w) { return h_denominator(cplx(w, 0.0), s).real(); };
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0.0) throw Error(ErrorKind::DegenerateInput, "Re h does not change sign on the bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace usc
