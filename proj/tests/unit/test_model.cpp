#include <doctest.h>

#include <cmath>
#include <numbers>

#include "usc/errors.hpp"
#include "usc/model.hpp"

using namespace usc;
using std::numbers::pi;

TEST_CASE("grid: hand evaluation of omega_k and g_k") {
  double L = 4 * pi;
  ModeGrid g = build_mode_grid(4, L, Linear{1.0}, HardCutoff{4.0}, 0.1);
  REQUIRE(g.n_modes == 4);
  for (int n = 1; n <= 4; ++n) {
    double w = 2 * pi * n / L;
    CHECK(g.k(n - 1) == doctest::Approx(w).epsilon(1e-15));
    CHECK(g.omegas(n - 1) == doctest::Approx(w).epsilon(1e-15));
    CHECK(g.g(n - 1) == doctest::Approx(std::sqrt(pi * 0.1 * w / L)).epsilon(1e-14));
    CHECK(g.level_spacing(n - 1) == doctest::Approx(0.5));
  }
  CHECK(g.uniform());
}

TEST_CASE("grid: exponential cutoff factor") {
  ModeGrid g = build_mode_grid(8, 10.0, Linear{1.0}, ExponentialCutoff{3.0}, 0.2);
  for (int i = 0; i < 8; ++i) {
    double w = g.omegas(i);
    CHECK(g.g(i) == doctest::Approx(std::sqrt(pi * 0.2 * w / 10.0) * std::exp(-w / 6.0)).epsilon(1e-14));
  }
}

TEST_CASE("grid: zero coupling") {
  ModeGrid g = build_mode_grid(32, 20.0, Linear{1.0}, ExponentialCutoff{10.0}, 0.0);
  CHECK(g.g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid: hard cutoff drops modes, empty grid rejected") {
  ModeGrid g = build_mode_grid(10, 2 * pi, Linear{1.0}, HardCutoff{4.5}, 0.1);
  CHECK(g.n_modes == 4);
  CHECK_THROWS_AS(build_mode_grid(3, 0.1, Linear{1.0}, HardCutoff{1.0}, 0.1), Error);
}

TEST_CASE("grid: sine dispersion") {
  ModeGrid g = build_mode_grid(16, 40.0, Sine{1.0}, HardCutoff{4.0}, 0.1);
  for (int i = 0; i < g.n_modes; ++i) {
    CHECK(g.omegas(i) == doctest::Approx(4.0 * std::sin(g.k(i) / 4.0)));
    CHECK(g.group_velocity(i) == doctest::Approx(std::cos(g.k(i) / 4.0)));
  }
  CHECK_FALSE(g.uniform());
  // k beyond the band edge
  CHECK_THROWS_AS(build_mode_grid(64, 20.0, Sine{1.0}, HardCutoff{4.0}, 0.1), Error);
}

TEST_CASE("grid: histogram of 2 pi sum g^2 reproduces pi alpha omega e^(-omega/omega_c)") {
  const int n = 1 << 10;
  const double wc = 10.0, alpha = 0.05;
  ModeGrid g = uniform_grid(n, 20.0, ExponentialCutoff{wc}, alpha);
  // edges halfway between modes so every bin holds a whole number of them
  double dw = g.level_spacing(0);
  Eigen::VectorXd edges = Eigen::VectorXd::LinSpaced(20, 0.1, 2.0);
  for (auto& e : edges) e = (std::round(e / dw) + 0.5) * dw;
  Eigen::VectorXd j = binned_spectral_density(g, edges);
  for (Eigen::Index b = 0; b + 1 < edges.size(); ++b) {
    double wm = 0.5 * (edges(b) + edges(b + 1));
    double ref = pi * alpha * wm * std::exp(-wm / wc);
    CHECK(std::abs(j(b) / ref - 1.0) < 0.05);
  }
}

TEST_CASE("spectral density") {
  ModeGrid g = uniform_grid(16, 4.0, ExponentialCutoff{5.0}, 0.1);
  CHECK(spectral_density(g, 2.0) == doctest::Approx(pi * 0.1 * 2.0 * std::exp(-0.4)));
  ModeGrid h = uniform_grid(16, 4.0, HardCutoff{4.0}, 0.1);
  CHECK(spectral_density(h, 2.0) == doctest::Approx(pi * 0.2));
}

TEST_CASE("wavepacket: flat envelope limit") {
  ModeGrid g = uniform_grid(64, 4.0, HardCutoff{4.0}, 0.1);
  Wavepacket wp = gaussian_wavepacket(g, 1.0, 1e8, 0.0);
  double u = 1.0 / std::sqrt(64.0);
  for (int i = 0; i < 64; ++i) {
    CHECK(wp.phi(i).real() == doctest::Approx(u).epsilon(1e-6));
    CHECK(std::abs(wp.phi(i).imag()) < 1e-15);
  }
}

TEST_CASE("wavepacket: x = 0 is real positive and peaked at the mode nearest mu") {
  ModeGrid g = uniform_grid(64, 4.0, HardCutoff{4.0}, 0.1);
  Wavepacket wp = gaussian_wavepacket(g, 1.0, 0.01, 0.0);
  CHECK(wp.phi.norm() == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::Index arg;
  wp.phi.real().maxCoeff(&arg);
  Eigen::Index nearest;
  (g.omegas.array() - 1.0).abs().minCoeff(&nearest);
  CHECK(arg == nearest);
  for (int i = 0; i < 64; ++i) {
    CHECK(wp.phi(i).real() > 0.0);
    CHECK(wp.phi(i).imag() == 0.0);
  }
}

TEST_CASE("wavepacket: phase gradient leaves the modulus unchanged") {
  ModeGrid g = uniform_grid(64, 4.0, HardCutoff{4.0}, 0.1);
  Wavepacket a = gaussian_wavepacket(g, 1.0, 0.01, 0.0);
  Wavepacket b = gaussian_wavepacket(g, 1.0, 0.01, 20.0);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(b.phi(i)) == doctest::Approx(std::abs(a.phi(i))).epsilon(1e-13));
    std::complex<double> expect = a.phi(i) * std::polar(1.0, -g.omegas(i) * 20.0);
    CHECK(std::abs(b.phi(i) - expect) < 1e-14);
  }
}

TEST_CASE("wavepacket: bad inputs") {
  ModeGrid g = uniform_grid(16, 4.0, HardCutoff{4.0}, 0.1);
  CHECK_THROWS_AS(gaussian_wavepacket(g, 1.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(gaussian_wavepacket(g, 1.0, -1.0, 0.0), Error);
  // envelope underflows everywhere
  CHECK_THROWS_AS(gaussian_wavepacket(g, 1e4, 1e-6, 0.0), Error);
}
