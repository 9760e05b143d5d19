#include <doctest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "usc/dynamics.hpp"
#include "usc/errors.hpp"

using namespace usc;
using cplx = std::complex<double>;

namespace {

// Term-by-term operator on qubit x (n0, n1), occupations up to 2 per mode:
// H0 + d0(F+ s- + s+ F) - d0 sz F+F - d0(s+ F+FF + s- F+F+F) + d0 sz F+F+FF
Eigen::MatrixXd fock_hamiltonian_n2(const Eigen::Vector2d& w, const Eigen::Vector2d& f, double dt) {
  const int d = 18;
  auto idx = [](int q, int n0, int n1) { return q * 9 + n0 * 3 + n1; };
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(d, d), a1 = a0, sm = a0, sz = a0, num = a0;
  for (int q = 0; q < 2; ++q)
    for (int n0 = 0; n0 < 3; ++n0)
      for (int n1 = 0; n1 < 3; ++n1) {
        int i = idx(q, n0, n1);
        if (n0 > 0) a0(idx(q, n0 - 1, n1), i) = std::sqrt(double(n0));
        if (n1 > 0) a1(idx(q, n0, n1 - 1), i) = std::sqrt(double(n1));
        if (q == 1) sm(idx(0, n0, n1), i) = 1.0;
        sz(i, i) = q == 1 ? 1.0 : -1.0;
        num(i, i) = w(0) * n0 + w(1) * n1;
      }
  Eigen::MatrixXd F = f(0) * a0 + f(1) * a1, Fd = F.transpose(), sp = sm.transpose();
  double d0 = 2.0 * dt;
  Eigen::MatrixXd h = num + 0.5 * dt * sz;
  h += d0 * (Fd * sm + sp * F);
  h -= d0 * sz * Fd * F;
  h -= d0 * (sp * Fd * F * F + sm * Fd * Fd * F);
  h += d0 * sz * Fd * Fd * F * F;
  return h;
}

Eigen::VectorXd fock_ket(const BasisState& st) {
  auto idx = [](int q, int n0, int n1) { return q * 9 + n0 * 3 + n1; };
  Eigen::VectorXd v = Eigen::VectorXd::Zero(18);
  int occ[2] = {0, 0};
  if (st.k >= 0) ++occ[st.k];
  if (st.p >= 0) ++occ[st.p];
  v(idx(st.excited ? 1 : 0, occ[0], occ[1])) = 1.0;
  return v;
}

HamiltonianOperator make_h(const TwoExcBasis& b, const PolaronParams& p, const ModeGrid& g) {
  HamiltonianOperator h(b, p, g);
  h.estimate_bounds();
  return h;
}

}  // namespace

TEST_CASE("basis: dimensions and round trip") {
  CHECK(TwoExcBasis(1).dimension() == 5);
  CHECK(TwoExcBasis(2).dimension() == 9);
  CHECK(TwoExcBasis(128).dimension() == 1 + 129 + 128 + 128 * 129 / 2);
  TwoExcBasis b(16);
  for (Eigen::Index i = 0; i < b.dimension(); ++i) {
    BasisState s = b.decode(i);
    CHECK(b.encode(s) == i);
    CHECK(b.decode(b.encode(s)) == s);
  }
  CHECK(b.pair(3, 7) == b.pair(7, 3));
  CHECK_THROWS_AS(b.decode(b.dimension()), Error);
  CHECK_THROWS_AS(b.encode({2, false, 3, 1}), Error);
  CHECK_THROWS_AS(TwoExcBasis(0), Error);
}

TEST_CASE("Hamiltonian: uncoupled limit is diagonal") {
  ModeGrid g = uniform_grid(5, 2.5, HardCutoff{4.0}, 0.0);
  PolaronParams p = solve_polaron(g);
  TwoExcBasis b(5);
  Eigen::MatrixXcd h = HamiltonianOperator(b, p, g).to_dense();
  for (Eigen::Index i = 0; i < b.dimension(); ++i) {
    BasisState s = b.decode(i);
    double e = s.excited ? 0.5 : -0.5;
    if (s.k >= 0) e += g.omegas(s.k);
    if (s.p >= 0) e += g.omegas(s.p);
    CHECK(std::abs(h(i, i) - e) < 1e-15);
  }
  CHECK((h - Eigen::MatrixXcd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Hamiltonian: N = 2 against the term-by-term Fock construction") {
  ModeGrid g = uniform_grid(2, 2.0, HardCutoff{4.0}, 0.1);
  PolaronParams p = solve_polaron(g);
  TwoExcBasis b(2);
  Eigen::MatrixXcd h = HamiltonianOperator(b, p, g).to_dense();
  Eigen::MatrixXd full = fock_hamiltonian_n2(g.omegas, p.f, p.delta_tilde);
  REQUIRE(b.dimension() == 9);
  for (Eigen::Index i = 0; i < 9; ++i)
    for (Eigen::Index j = 0; j < 9; ++j) {
      double ref = fock_ket(b.decode(i)).dot(full * fock_ket(b.decode(j)));
      CHECK(std::abs(h(i, j) - ref) < 1e-14);
    }
}

TEST_CASE("Hamiltonian: hermitian, bounds enclose the spectrum") {
  ModeGrid g = uniform_grid(6, 3.0, HardCutoff{4.0}, 0.2);
  PolaronParams p = solve_polaron(g);
  TwoExcBasis b(6);
  HamiltonianOperator op = make_h(b, p, g);
  Eigen::MatrixXcd h = op.to_dense();
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  CHECK(op.e_min() <= es.eigenvalues().minCoeff());
  CHECK(op.e_max() >= es.eigenvalues().maxCoeff());
}

TEST_CASE("Hamiltonian: memory guard") {
  ModeGrid g = uniform_grid(64, 4.0, HardCutoff{4.0}, 0.1);
  PolaronParams p = solve_polaron(g);
  CHECK_THROWS_AS(HamiltonianOperator(TwoExcBasis(64), p, g, 1e4), Error);
}

TEST_CASE("Chebyshev step against the dense exponential") {
  ModeGrid g = uniform_grid(4, 3.0, HardCutoff{4.0}, 0.15);
  PolaronParams p = solve_polaron(g);
  TwoExcBasis b(4);
  HamiltonianOperator op = make_h(b, p, g);
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  Eigen::VectorXcd psi(b.dimension());
  for (auto& x : psi) x = cplx(n(rng), n(rng));
  psi.normalize();
  Eigen::MatrixXcd u = (cplx(0.0, -0.7) * op.to_dense()).exp();
  int order = 0;
  Eigen::VectorXcd out = chebyshev_step(psi, op, 0.7, 1e-12, &order);
  CHECK((out - u * psi).norm() < 1e-11);
  CHECK(order >= 4);
  HamiltonianOperator narrow = op;
  narrow.set_bounds(-0.1, 0.1);
  CHECK_THROWS_AS(chebyshev_step(psi, narrow, 5.0, 1e-12), Error);
}

TEST_CASE("observables: basis states") {
  TwoExcBasis b(6);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(b.dimension());
  e(b.e0()) = 1.0;
  ObservableRecord r = observables(e, b);
  CHECK(r.p_e == 1.0);
  CHECK(r.n_excit == 1.0);
  Eigen::VectorXcd q = Eigen::VectorXcd::Zero(b.dimension());
  q(b.pair(1, 4)) = 1.0;
  r = observables(q, b);
  CHECK(r.p_e == 0.0);
  CHECK(r.n_excit == 2.0);
  for (int k = 0; k < 6; ++k) CHECK(r.marginal(k) == ((k == 1 || k == 4) ? 1.0 : 0.0));
}

TEST_CASE("observables: excitation number against a dense contraction") {
  TwoExcBasis b(7);
  std::mt19937 rng(9);
  std::normal_distribution<double> n;
  Eigen::VectorXcd psi(b.dimension());
  for (auto& x : psi) x = cplx(n(rng), n(rng));
  psi.normalize();
  Eigen::VectorXd num(b.dimension());
  Eigen::VectorXd pe(b.dimension());
  for (Eigen::Index i = 0; i < b.dimension(); ++i) {
    BasisState s = b.decode(i);
    num(i) = s.sector;
    pe(i) = s.excited ? 1.0 : 0.0;
  }
  ObservableRecord r = observables(psi, b);
  CHECK(r.n_excit == doctest::Approx(psi.dot(num.cast<cplx>().asDiagonal() * psi).real()).epsilon(1e-14));
  CHECK(r.p_e == doctest::Approx(psi.dot(pe.cast<cplx>().asDiagonal() * psi).real()).epsilon(1e-14));
  CHECK(r.norm == doctest::Approx(1.0));
  Eigen::VectorXcd back = psi;
  pack_pairs(unpack_pairs(psi, b), b, back);
  CHECK((back - psi).norm() < 1e-15);
}

TEST_CASE("initial states") {
  ModeGrid g = uniform_grid(32, 4.0, HardCutoff{4.0}, 0.1);
  TwoExcBasis b(32);
  Wavepacket a = gaussian_wavepacket(g, 1.0, 0.01, -5.0);
  ObservableRecord r = observables(initial_state(b, {a}), b);
  CHECK(r.norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.p_e == 0.0);
  CHECK(r.n_excit == doctest::Approx(1.0).epsilon(1e-14));

  r = observables(initial_state(b, {a, a}), b);
  CHECK(r.norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.n_excit == doctest::Approx(2.0).epsilon(1e-14));
  CHECK((r.psi2 - r.psi2.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // disjoint supports
  Wavepacket lo = a, hi = a;
  lo.phi.setZero();
  hi.phi.setZero();
  lo.phi.head(4).setConstant(0.5);
  hi.phi.tail(4).setConstant(cplx(0.0, 0.5));
  r = observables(initial_state(b, {lo, hi}), b);
  for (int k = 0; k < 32; ++k)
    CHECK(r.marginal(k) == doctest::Approx(std::norm(lo.phi(k)) + std::norm(hi.phi(k))).epsilon(1e-14));

  Wavepacket bad = a;
  bad.phi *= 2.0;
  CHECK_THROWS_AS(initial_state(b, {bad}), Error);
  CHECK_THROWS_AS(initial_state(b, {}), Error);
}

TEST_CASE("propagation: uncoupled packet only picks up free phases") {
  ModeGrid g = uniform_grid(24, 3.0, HardCutoff{4.0}, 0.0);
  PolaronParams p = solve_polaron(g);
  TwoExcBasis b(24);
  HamiltonianOperator h = make_h(b, p, g);
  Wavepacket a = gaussian_wavepacket(g, 1.0, 0.05, -3.0);
  Eigen::VectorXcd st = initial_state(b, {a});
  auto snaps = propagate(st, h, {5.0, 0.5, 1e-12, false});
  CHECK(snaps.size() == 11);
  for (const auto& s : snaps) {
    CHECK(s.obs.p_e < 1e-28);
    for (int k = 0; k < 24; ++k) {
      cplx free = a.phi(k) * std::polar(1.0, -(g.omegas(k) - 0.5) * s.obs.t);
      CHECK(std::abs(s.obs.psi1(k) - free) < 1e-11);
    }
  }
}

TEST_CASE("propagation: zero duration gives the initial record") {
  ModeGrid g = uniform_grid(16, 4.0, HardCutoff{4.0}, 0.12);
  PolaronParams p = solve_polaron(g);
  TwoExcBasis b(16);
  HamiltonianOperator h = make_h(b, p, g);
  Eigen::VectorXcd st = initial_state(b, {gaussian_wavepacket(g, p.delta_tilde, 0.01, -5.0)});
  ObservableRecord r0 = observables(st, b);
  auto snaps = propagate(st, h, {0.0, 0.25, 1e-10, true});
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].obs.p_e == r0.p_e);
  CHECK(snaps[0].obs.n_excit == r0.n_excit);
  CHECK(snaps[0].state.has_value());
  CHECK_THROWS_AS(propagate(st, h, {-1.0, 0.25, 1e-10, false}), Error);
}

TEST_CASE("propagation: norm and excitation number at N = 128, t = 60") {
  ModeGrid g = uniform_grid(128, 4.0, HardCutoff{4.0}, 0.12);
  PolaronParams p = solve_polaron(g);
  TwoExcBasis b(128);
  HamiltonianOperator h = make_h(b, p, g);
  Wavepacket a = gaussian_wavepacket(g, p.delta_tilde, 0.01, -15.0);
  Eigen::VectorXcd st = initial_state(b, {a, a});
  auto snaps = propagate(st, h, {60.0, 5.0, 1e-10, false});
  for (const auto& s : snaps) {
    CHECK(std::abs(s.obs.norm - 1.0) < 1e-8);
    CHECK(std::abs(s.obs.n_excit - 2.0) < 1e-8);
  }
  // the packet has interacted with the emitter
  double peak = 0.0;
  for (const auto& s : snaps) peak = std::max(peak, s.obs.p_e);
  CHECK(peak > 1e-3);
}
