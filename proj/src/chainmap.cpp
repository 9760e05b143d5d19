#include "usc/chainmap.hpp"

#include "usc/errors.hpp"

namespace usc {

ChainCoefficients lanczos_chain(const Eigen::VectorXd& w, const Eigen::VectorXd& seed) {
  const Eigen::Index n = w.size();
  if (seed.size() != n) throw Error(ErrorKind::Parameter, "seed size does not match the spectrum");
  double th = seed.norm();
  if (!(th > 0.0)) throw Error(ErrorKind::DegenerateInput, "no bath to map: seed vector vanishes");
  const double stop = 1e-13 * std::max(w.cwiseAbs().maxCoeff(), 1e-300);

  Eigen::MatrixXd q(n, n);
  Eigen::VectorXd a(n), b(n);
  q.col(0) = seed / th;
  Eigen::Index m = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd v = w.cwiseProduct(q.col(j));
    a(j) = q.col(j).dot(v);
    m = j + 1;
    if (j + 1 == n) break;
    // two passes of classical Gram-Schmidt against all previous vectors
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * v);
    double nb = v.norm();
    if (nb < stop) break;
    b(j) = nb;
    q.col(j + 1) = v / nb;
  }
  ChainCoefficients c;
  c.theta = th;
  c.alphas = a.head(m);
  c.betas = b.head(m > 0 ? m - 1 : 0);
  c.basis = q.leftCols(m);
  return c;
}

ChainCoefficients chain_coefficients(const PolaronParams& params, const ModeGrid& grid) {
  if (!(params.theta > 0.0)) throw Error(ErrorKind::DegenerateInput, "no bath to map: theta = 0");
  ChainCoefficients c = lanczos_chain(grid.omegas, params.f);
  c.theta = params.theta;
  c.delta_tilde = params.delta_tilde;
  c.beta0 = params.delta_tilde * c.theta;
  return c;
}

Eigen::MatrixXd chain_matrix(const ChainCoefficients& c) {
  Eigen::Index m = c.alphas.size();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  t.diagonal() = c.alphas;
  for (Eigen::Index j = 0; j + 1 < m; ++j) t(j, j + 1) = t(j + 1, j) = c.betas(j);
  return t;
}

}  // namespace usc
