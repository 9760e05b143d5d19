#pragma once

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <optional>
#include <utility>

#include "usc/linres.hpp"
#include "usc/quadrature.hpp"

namespace usc {

struct Pi2Matrix {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  cplx z;
  double error = 0.0;
  long evals = 0;
  bool converged = false;
};

// Bubble i (G * G)(z) table over O2 = (bb, bF, FF), convolutions on omega + i eta.
// full_table evaluates all nine printed entries independently (G_Fb through the
// Dyson route) instead of filling the symmetric ones from six convolutions.
Pi2Matrix pi2_matrix(cplx z, const SelfEnergyModel& s, const QuadratureSpec& quad, bool full_table = false);

Eigen::Matrix3cd u2(double delta0, double u0);
// u0 -> infinity: diag(0, inverse of the photon block)
Eigen::Matrix3cd u2_inverse_hardcore(double delta0);
// [u2^-1 - Pi2]^-1, hardcore unless a finite u0 is given
Eigen::Matrix3cd t_matrix_2(const Pi2Matrix& pi2, double delta0, std::optional<double> u0 = std::nullopt);

struct BoundaryVector {
  Eigen::Vector3cd v;         // (2 b1 b2, a1 b2 + b1 a2, 2 a1 a2)
  Eigen::Vector3cd v_closed;  // (2, (E-2Dt)/d0, ((E-2Dt)^2 - eps^2)/(2 d0^2)) b1 b2
  cplx alpha1, alpha2, beta1, beta2;
  double E, eps;
};

BoundaryVector boundary_vector(int k1, int k2, const PolaronParams& params, const ModeGrid& grid,
                               const SelfEnergyModel& s);

// Memoized Pi2 for one self-energy model and quadrature spec; safe for concurrent use.
class Pi2Cache {
 public:
  Pi2Cache(SelfEnergyModel s, QuadratureSpec quad) : s_(std::move(s)), quad_(quad) {}
  Pi2Matrix get(cplx z);
  const SelfEnergyModel& sigma() const { return s_; }
  const QuadratureSpec& spec() const { return quad_; }
  std::size_t size() const;

 private:
  SelfEnergyModel s_;
  QuadratureSpec quad_;
  mutable std::mutex mu_;
  std::map<std::pair<double, double>, Pi2Matrix> table_;
};

// M = v_f^T T2(E_i) v_i with the four leg factors inside v; the 2 pi delta is not applied.
cplx s_correlated(int p1, int p2, int k1, int k2, const PolaronParams& params, const ModeGrid& grid,
                  Pi2Cache& cache);

// s_k1 s_k2 (d_p1k1 d_p2k2 + d_p2k1 d_p1k2)
cplx s_uncorrelated(int p1, int p2, int k1, int k2, const ScatterResult1& sc);

// On a uniform grid the discrete on-shell amplitude is -2 pi i M / dE.
double shell_spacing(const ModeGrid& grid);

// Outgoing correlated pair amplitude for a symmetric input Psi(k1, k2) on a uniform grid:
//   out(p1, p2) = sum_{k on shell} (1/2)(-2 pi i / dE) M(p; k) Psi(k)
// Shells whose input amplitude is below threshold * max|Psi| are skipped.
Eigen::MatrixXcd predict_correlated(const Eigen::MatrixXcd& psi_in, const PolaronParams& params,
                                    const ModeGrid& grid, Pi2Cache& cache, double threshold = 1e-6,
                                    int jobs = 1);

}  // namespace usc
