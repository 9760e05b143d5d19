#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "usc/chainmap.hpp"
#include "usc/errors.hpp"

using namespace usc;

TEST_CASE("chain: single mode") {
  Eigen::VectorXd w(1), f(1);
  w << 1.7;
  f << 0.3;
  ChainCoefficients c = lanczos_chain(w, f);
  REQUIRE(c.alphas.size() == 1);
  CHECK(c.alphas(0) == doctest::Approx(1.7));
  CHECK(c.betas.size() == 0);
}

TEST_CASE("chain: two modes by hand") {
  Eigen::VectorXd w(2), f(2);
  w << 1.0, 2.0;
  f << 1.0, 1.0;
  ChainCoefficients c = lanczos_chain(w, f);
  REQUIRE(c.alphas.size() == 2);
  CHECK(c.alphas(0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(c.betas(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.alphas(1) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(c.basis.col(0).isApprox(Eigen::Vector2d(1, 1) / std::sqrt(2.0)));
}

TEST_CASE("chain: spectrum and first coupling at N = 64") {
  ModeGrid g = uniform_grid(64, 4.0, ExponentialCutoff{4.0}, 0.1);
  PolaronParams p = solve_polaron(g);
  ChainCoefficients c = chain_coefficients(p, g);
  REQUIRE(c.alphas.size() == 64);
  CHECK(c.beta0 == p.delta_tilde * p.theta);
  CHECK(c.theta == p.theta);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain_matrix(c));
  Eigen::VectorXd ev = es.eigenvalues();
  std::vector<double> w(g.omegas.data(), g.omegas.data() + 64);
  std::sort(w.begin(), w.end());
  for (int i = 0; i < 64; ++i) CHECK(std::abs(ev(i) - w[i]) < 1e-10);
  // the chain basis is orthonormal
  CHECK((c.basis.transpose() * c.basis - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chain: degenerate seeds") {
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
  CHECK_THROWS_AS(lanczos_chain(w, Eigen::VectorXd::Zero(4)), Error);
  ModeGrid g = uniform_grid(8, 4.0, HardCutoff{4.0}, 0.0);
  CHECK_THROWS_AS(chain_coefficients(solve_polaron(g), g), Error);
  // seed on a single mode: the chain terminates after one site
  Eigen::VectorXd s = Eigen::VectorXd::Zero(4);
  s(2) = 1.0;
  ChainCoefficients c = lanczos_chain(w, s);
  CHECK(c.alphas.size() == 1);
  CHECK(c.alphas(0) == doctest::Approx(3.0));
}
