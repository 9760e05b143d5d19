#include <cmath>
#include <numbers>

#include "usc/errors.hpp"
#include "usc/linres.hpp"

namespace usc {

namespace {

constexpr double kSeriesRadius = 1e-3;

// -2 alpha Dt sum_{n>=2} u^{n-2} / (n (n-1)),  u = (z + Dt)/Dt
template <class T>
T near_minus_gap(T u, double alpha, double dt) {
  T sum = 0.5, term = 1.0;
  for (int n = 3; n < 40; ++n) {
    term *= u;
    T add = term / double(n * (n - 1));
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return -2.0 * alpha * dt * sum;
}

}  // namespace

SelfEnergyValue self_energy_closed(double omega, double alpha, double dt) {
  using std::numbers::pi;
  if (!(dt > 0.0)) throw Error(ErrorKind::Parameter, "delta_tilde must be positive");
  if (alpha == 0.0) return {0.0};
  if (omega == 0.0) return {cplx(-2.0 * alpha * dt, 0.0)};
  double u = (omega + dt) / dt;
  if (std::abs(u) < kSeriesRadius) return {cplx(near_minus_gap(u, alpha, dt), 0.0)};
  double pre = 2.0 * alpha * dt * dt / ((omega + dt) * (omega + dt));
  if (omega > 0.0)
    return {pre * cplx(omega * std::log(omega / dt) - omega - dt, -pi * omega)};
  return {cplx(pre * (omega * std::log(-omega / dt) - omega - dt), 0.0)};
}

cplx self_energy_closed(cplx z, double alpha, double dt) {
  if (z.imag() == 0.0) return self_energy_closed(z.real(), alpha, dt).sigma;
  if (!(dt > 0.0)) throw Error(ErrorKind::Parameter, "delta_tilde must be positive");
  if (alpha == 0.0) return 0.0;
  cplx u = (z + dt) / dt;
  if (std::abs(u) < kSeriesRadius) return near_minus_gap(u, alpha, dt);
  cplx pre = 2.0 * alpha * dt * dt / ((z + dt) * (z + dt));
  return pre * (z * std::log(-z / dt) - z - dt);
}

SelfEnergyValue self_energy_discrete(double omega, const PolaronParams& params, const ModeGrid& grid,
                                     double eta) {
  if (!(eta > 0.0)) throw Error(ErrorKind::Parameter, "eta must be positive");
  double d2 = 4.0 * params.delta_tilde * params.delta_tilde;
  cplx s = 0.0;
  for (int i = 0; i < grid.n_modes; ++i)
    s += d2 * params.f(i) * params.f(i) / cplx(omega - grid.omegas(i), eta);
  return {s};
}

double default_eta(const ModeGrid& grid) {
  double m = 0.0;
  for (int i = 0; i < grid.n_modes; ++i) m = std::max(m, grid.level_spacing(i));
  return 4.0 * m;
}

SelfEnergyModel SelfEnergyModel::closed(double alpha, double delta_tilde) {
  if (!(delta_tilde > 0.0)) throw Error(ErrorKind::Parameter, "delta_tilde must be positive");
  SelfEnergyModel m;
  m.source_ = SigmaSource::Closed;
  m.alpha_ = alpha;
  m.dt_ = delta_tilde;
  m.features_ = {-delta_tilde, 0.0};
  return m;
}

SelfEnergyModel SelfEnergyModel::discrete(const PolaronParams& params, const ModeGrid& grid, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorKind::Parameter, "eta must be positive");
  SelfEnergyModel m;
  m.source_ = SigmaSource::Discrete;
  m.alpha_ = grid.alpha;
  m.dt_ = params.delta_tilde;
  m.eta_ = eta;
  m.x_ = grid.omegas;
  m.w_ = 4.0 * m.dt_ * m.dt_ * params.f.array().square().matrix();
  m.features_.assign(grid.omegas.data(), grid.omegas.data() + grid.n_modes);
  return m;
}

SelfEnergyModel SelfEnergyModel::grid(const PolaronParams& params, const ModeGrid& grid) {
  SelfEnergyModel m;
  m.source_ = SigmaSource::Grid;
  m.alpha_ = grid.alpha;
  m.dt_ = params.delta_tilde;
  int n = grid.n_modes;
  // nodes: 0, w_1..w_N, w_N + spacing/2 ; density zero at 0 and flat over the last half cell
  Eigen::VectorXd x(n + 2), d(n + 2);
  x(0) = 0.0;
  d(0) = 0.0;
  for (int i = 0; i < n; ++i) {
    x(i + 1) = grid.omegas(i);
    d(i + 1) = 4.0 * m.dt_ * m.dt_ * params.f(i) * params.f(i) / grid.level_spacing(i);
  }
  x(n + 1) = grid.omegas(n - 1) + 0.5 * grid.level_spacing(n - 1);
  d(n + 1) = d(n);
  Eigen::VectorXd slope(n + 1);
  double c0 = 0.0;
  for (int i = 0; i <= n; ++i) {
    double dx = x(i + 1) - x(i);
    if (!(dx > 0.0)) throw Error(ErrorKind::Parameter, "grid self-energy needs increasing mode energies");
    slope(i) = (d(i + 1) - d(i)) / dx;
    c0 -= slope(i) * dx;
  }
  m.kappa_.resize(n + 2);
  for (int j = 0; j < n + 2; ++j) {
    double right = j <= n ? slope(j) : 0.0;
    double left = j > 0 ? slope(j - 1) : 0.0;
    m.kappa_(j) = right - left;
  }
  m.x_ = x;
  m.d_last_ = d(n + 1);
  m.c0_ = c0;
  m.features_.assign(x.data(), x.data() + x.size());
  return m;
}

cplx SelfEnergyModel::operator()(cplx z) const {
  switch (source_) {
    case SigmaSource::Closed:
      return self_energy_closed(z, alpha_, dt_);
    case SigmaSource::Discrete: {
      cplx s = 0.0;
      cplx ze = z + cplx(0.0, eta_);
      for (Eigen::Index i = 0; i < x_.size(); ++i) s += w_(i) / (ze - x_(i));
      return s;
    }
    case SigmaSource::Grid: {
      // +0.0 imaginary part keeps real-axis evaluation on the retarded side of every log cut
      cplx zz(z.real(), z.imag() == 0.0 ? 0.0 : z.imag());
      cplx s = c0_;
      for (Eigen::Index j = 0; j < x_.size(); ++j) {
        cplx u = zz - x_(j);
        if (u != 0.0) s += kappa_(j) * u * std::log(u);
      }
      s -= d_last_ * std::log(zz - x_(x_.size() - 1));
      return s;
    }
  }
  return 0.0;
}

}  // namespace usc
