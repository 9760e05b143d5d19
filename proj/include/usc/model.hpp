#pragma once

#include <Eigen/Dense>
#include <complex>
#include <variant>

namespace usc {

struct Linear {
  double c = 1.0;
};
// omega = omega_c sin(c k / omega_c), omega_c taken from the cutoff
struct Sine {
  double c = 1.0;
};
using Dispersion = std::variant<Linear, Sine>;

struct ExponentialCutoff {
  double omega_c = 10.0;
};
struct HardCutoff {
  double omega_c = 4.0;
};
using Cutoff = std::variant<ExponentialCutoff, HardCutoff>;

double cutoff_frequency(const Cutoff& cutoff);

struct ModeGrid {
  int n_modes = 0;
  double length = 0.0;
  Dispersion dispersion;
  Cutoff cutoff;
  double alpha = 0.0;
  double dk = 0.0;
  Eigen::VectorXd k;
  Eigen::VectorXd omegas;
  Eigen::VectorXd g;
  Eigen::VectorXd group_velocity;

  // local energy spacing omega'(k) dk
  double level_spacing(int i) const { return group_velocity(i) * dk; }
  bool uniform() const { return std::holds_alternative<Linear>(dispersion); }
};

// Momenta k_n = 2 pi n / L, n = 1..n_modes; hard cutoff drops modes above omega_c.
ModeGrid build_mode_grid(int n_modes, double length, const Dispersion& dispersion,
                         const Cutoff& cutoff, double alpha);

// Grid whose spacing puts n_modes uniformly up to omega_max (Linear, c = 1).
ModeGrid uniform_grid(int n_modes, double omega_max, const Cutoff& cutoff, double alpha);

// pi alpha omega times the squared cutoff factor
double spectral_density(const ModeGrid& grid, double omega);

// 2 pi sum_k g_k^2 binned on edges, divided by bin width
Eigen::VectorXd binned_spectral_density(const ModeGrid& grid, const Eigen::VectorXd& edges);

struct Wavepacket {
  double mu = 0.0;
  double s = 0.0;
  double x = 0.0;
  Eigen::VectorXcd phi;
};

// phi_k ~ exp(-(w_k - mu)^2 / (2 s) - i w_k x), unit 2-norm
Wavepacket gaussian_wavepacket(const ModeGrid& grid, double mu, double s, double x);

}  // namespace usc
