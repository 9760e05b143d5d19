#include "usc/model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "usc/errors.hpp"

namespace usc {

namespace {

struct Sample {
  double omega;
  double vg;
};

Sample disperse(const Dispersion& d, double omega_c, double k) {
  if (auto* lin = std::get_if<Linear>(&d)) return {lin->c * k, lin->c};
  const auto& sine = std::get<Sine>(d);
  double arg = sine.c * k / omega_c;
  return {omega_c * std::sin(arg), sine.c * std::cos(arg)};
}

double cutoff_factor(const Cutoff& c, double omega) {
  if (auto* e = std::get_if<ExponentialCutoff>(&c)) return std::exp(-omega / (2.0 * e->omega_c));
  return 1.0;
}

}  // namespace

double cutoff_frequency(const Cutoff& cutoff) {
  return std::visit([](const auto& c) { return c.omega_c; }, cutoff);
}

ModeGrid build_mode_grid(int n_modes, double length, const Dispersion& dispersion,
                         const Cutoff& cutoff, double alpha) {
  using std::numbers::pi;
  if (n_modes < 1) throw Error(ErrorKind::Parameter, "n_modes must be >= 1");
  if (!(length > 0.0)) throw Error(ErrorKind::Parameter, "length must be positive");
  if (!(alpha >= 0.0)) throw Error(ErrorKind::Parameter, "alpha must be >= 0");
  double wc = cutoff_frequency(cutoff);
  if (!(wc > 0.0)) throw Error(ErrorKind::Parameter, "cutoff frequency must be positive");
  double c = std::visit([](const auto& d) { return d.c; }, dispersion);
  if (!(c > 0.0)) throw Error(ErrorKind::Parameter, "dispersion velocity must be positive");

  ModeGrid grid;
  grid.length = length;
  grid.dispersion = dispersion;
  grid.cutoff = cutoff;
  grid.alpha = alpha;
  grid.dk = 2.0 * pi / length;

  bool sine = std::holds_alternative<Sine>(dispersion);
  if (sine && c * grid.dk * n_modes / wc > pi / 2.0 * (1.0 + 1e-14))
    throw Error(ErrorKind::Parameter, "sine dispersion: requested modes extend beyond the band edge");

  bool hard = std::holds_alternative<HardCutoff>(cutoff);
  std::vector<double> ks, ws, vs;
  for (int n = 1; n <= n_modes; ++n) {
    double k = grid.dk * n;
    Sample smp = disperse(dispersion, wc, k);
    if (hard && smp.omega > wc * (1.0 + 1e-14)) break;
    ks.push_back(k);
    ws.push_back(smp.omega);
    vs.push_back(smp.vg);
  }
  if (ws.empty()) throw Error(ErrorKind::Parameter, "no modes below the hard cutoff");

  int n = static_cast<int>(ws.size());
  grid.n_modes = n;
  grid.k = Eigen::Map<Eigen::VectorXd>(ks.data(), n);
  grid.omegas = Eigen::Map<Eigen::VectorXd>(ws.data(), n);
  grid.group_velocity = Eigen::Map<Eigen::VectorXd>(vs.data(), n);
  grid.g.resize(n);
  for (int i = 0; i < n; ++i) {
    double w = grid.omegas(i);
    grid.g(i) = std::sqrt(pi * alpha * w / length) * cutoff_factor(cutoff, w);
  }
  return grid;
}

ModeGrid uniform_grid(int n_modes, double omega_max, const Cutoff& cutoff, double alpha) {
  double length = 2.0 * std::numbers::pi * n_modes / omega_max;
  return build_mode_grid(n_modes, length, Linear{}, cutoff, alpha);
}

double spectral_density(const ModeGrid& grid, double omega) {
  double fc = cutoff_factor(grid.cutoff, omega);
  return std::numbers::pi * grid.alpha * omega * fc * fc;
}

Eigen::VectorXd binned_spectral_density(const ModeGrid& grid, const Eigen::VectorXd& edges) {
  Eigen::Index nb = edges.size() - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(std::max<Eigen::Index>(nb, 0));
  for (int i = 0; i < grid.n_modes; ++i) {
    double w = grid.omegas(i);
    for (Eigen::Index b = 0; b < nb; ++b) {
      if (w >= edges(b) && w < edges(b + 1)) {
        out(b) += 2.0 * std::numbers::pi * grid.g(i) * grid.g(i);
        break;
      }
    }
  }
  for (Eigen::Index b = 0; b < nb; ++b) out(b) /= edges(b + 1) - edges(b);
  return out;
}

Wavepacket gaussian_wavepacket(const ModeGrid& grid, double mu, double s, double x) {
  if (!(s > 0.0)) throw Error(ErrorKind::Parameter, "wavepacket variance s must be positive");
  Wavepacket wp{mu, s, x, Eigen::VectorXcd(grid.n_modes)};
  for (int i = 0; i < grid.n_modes; ++i) {
    double w = grid.omegas(i);
    double env = std::exp(-(w - mu) * (w - mu) / (2.0 * s));
    wp.phi(i) = env * std::polar(1.0, -w * x);
  }
  double norm = wp.phi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorKind::DegenerateInput, "wavepacket amplitudes underflow on this grid");
  wp.phi /= norm;
  return wp;
}

}  // namespace usc
