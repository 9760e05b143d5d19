#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "usc/model.hpp"
#include "usc/polaron.hpp"

namespace usc {

using cplx = std::complex<double>;

struct SelfEnergyValue {
  cplx sigma;
  double lamb_shift() const { return sigma.real(); }
  double gamma() const { return -2.0 * sigma.imag(); }
};

// Infinite-cutoff closed form on the real axis; exact limits at 0 and -delta_tilde.
SelfEnergyValue self_energy_closed(double omega, double alpha, double delta_tilde);
// Analytic continuation into Im z > 0 (real z falls back to the real-axis form).
cplx self_energy_closed(cplx z, double alpha, double delta_tilde);

// 4 Dt^2 sum_k f_k^2 / (omega - w_k + i eta)
SelfEnergyValue self_energy_discrete(double omega, const PolaronParams& params,
                                     const ModeGrid& grid, double eta);

enum class SigmaSource { Closed, Discrete, Grid };

// Self-energy evaluator shared by the response functions.
//  Closed:   infinite-cutoff closed form
//  Discrete: broadened mode sum
//  Grid:     continuum limit of the grid, density 4 Dt^2 f_k^2 / (level spacing) interpolated
//            linearly between modes; Im part at w_k equals -Gamma(w_k)/2 of the mode sum
class SelfEnergyModel {
 public:
  static SelfEnergyModel closed(double alpha, double delta_tilde);
  static SelfEnergyModel discrete(const PolaronParams& params, const ModeGrid& grid, double eta);
  static SelfEnergyModel grid(const PolaronParams& params, const ModeGrid& grid);

  cplx operator()(cplx z) const;
  SelfEnergyValue at(double omega) const { return {(*this)(cplx(omega, 0.0))}; }

  SigmaSource source() const { return source_; }
  double delta_tilde() const { return dt_; }
  double delta0() const { return 2.0 * dt_; }
  double eta() const { return eta_; }
  double alpha() const { return alpha_; }
  // points where the self-energy (and hence G) is not smooth on the real axis
  const std::vector<double>& features() const { return features_; }

 private:
  SigmaSource source_ = SigmaSource::Closed;
  double alpha_ = 0.0;
  double dt_ = 1.0;
  double eta_ = 0.0;
  Eigen::VectorXd x_, w_;  // Discrete: mode energies and weights
  Eigen::VectorXd kappa_;  // Grid: slope jumps at nodes x_
  double d_last_ = 0.0;
  double c0_ = 0.0;
  std::vector<double> features_;
};

// Default eta for discrete sums: 4x the largest local spacing.
double default_eta(const ModeGrid& grid);

inline cplx chi(cplx z, double delta_tilde) { return (z + delta_tilde) / (2.0 * delta_tilde); }

// h(z) = (z - Dt) - chi(z) Sigma
cplx h_denominator(cplx z, cplx sigma, double delta_tilde);
inline cplx h_denominator(cplx z, const SelfEnergyModel& s) {
  return h_denominator(z, s(z), s.delta_tilde());
}

Eigen::Matrix2cd u1(double delta0);
Eigen::Matrix2cd pi1(cplx z, cplx sigma, double delta_tilde);
// Closed form (1/h)[[(z-Dt)S, d0(z-Dt)], [d0(z-Dt), d0^2 chi]]
Eigen::Matrix2cd t_matrix_1(cplx z, const SelfEnergyModel& s);
// u1 sum_{n<terms} (Pi1 u1)^n
Eigen::Matrix2cd t_matrix_1_series(cplx z, const SelfEnergyModel& s, int terms);

enum class G1 { bb, bF, Fb, FF, bA, Ab, AA };

// Single-excitation Green's function elements. k, p index modes for the A legs.
cplx green1(G1 element, cplx z, const SelfEnergyModel& s, const PolaronParams& params,
            const ModeGrid& grid, int k = -1, int p = -1);

// bb, bF, FF at once (bF = Fb)
struct GreenBF {
  cplx bb, bF, FF;
};
GreenBF green_bf(cplx z, const SelfEnergyModel& s);
// Same elements via G0 + G0 T1 G0, returned as the full 2x2 matrix in (b, F)
Eigen::Matrix2cd green_bf_dyson(cplx z, const SelfEnergyModel& s);

struct ScatterResult1 {
  Eigen::VectorXd omegas;
  Eigen::VectorXcd s, t, r, sigma;
};

cplx chiral_phase(int k, const PolaronParams& params, const ModeGrid& grid, const SelfEnergyModel& s);
ScatterResult1 scatter1(const PolaronParams& params, const ModeGrid& grid, const SelfEnergyModel& s);
void transmission_reflection(ScatterResult1& res);
inline cplx transmission(cplx s) { return 0.5 * (s + 1.0); }
inline cplx reflection(cplx s) { return 0.5 * (s - 1.0); }

// Zero of Re h on the real axis inside [lo, hi].
double find_resonance(const SelfEnergyModel& s, double lo, double hi);

}  // namespace usc
