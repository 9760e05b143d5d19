#pragma once

#include <Eigen/Dense>

#include "usc/model.hpp"
#include "usc/polaron.hpp"

namespace usc {

struct ChainCoefficients {
  double theta = 0.0;
  double beta0 = 0.0;  // qubit to first site, delta_tilde * theta
  double delta_tilde = 0.0;
  Eigen::VectorXd alphas;  // on-site
  Eigen::VectorXd betas;   // hopping, size alphas.size() - 1
  Eigen::MatrixXd basis;   // columns: chain modes in the original mode basis
};

// Lanczos on diag(w) from seed/|seed| with full reorthogonalization; stops when the
// Krylov space is exhausted.
ChainCoefficients lanczos_chain(const Eigen::VectorXd& omegas, const Eigen::VectorXd& seed);

ChainCoefficients chain_coefficients(const PolaronParams& params, const ModeGrid& grid);

Eigen::MatrixXd chain_matrix(const ChainCoefficients& c);

}  // namespace usc
