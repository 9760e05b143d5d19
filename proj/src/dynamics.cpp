#include "usc/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "usc/errors.hpp"

namespace usc {

using cplx = std::complex<double>;

TwoExcBasis::TwoExcBasis(int n) : n_(n) {
  if (n < 1) throw Error(ErrorKind::Parameter, "basis needs at least one mode");
  dim_ = 1 + (1 + Eigen::Index(n)) + (Eigen::Index(n) + Eigen::Index(n) * (n + 1) / 2);
}

Eigen::Index TwoExcBasis::pair(int k, int p) const {
  if (k > p) std::swap(k, p);
  // rows k' < k contribute N - k' entries each
  Eigen::Index off = Eigen::Index(k) * n_ - Eigen::Index(k) * (k - 1) / 2;
  return pair_begin() + off + (p - k);
}

Eigen::Index TwoExcBasis::sector_begin(int sector) const {
  switch (sector) {
    case 0: return 0;
    case 1: return 1;
    case 2: return 2 + n_;
    default: return dim_;
  }
}

Eigen::Index TwoExcBasis::encode(const BasisState& st) const {
  auto in = [&](int k) { return k >= 0 && k < n_; };
  switch (st.sector) {
    case 0:
      if (!st.excited) return 0;
      break;
    case 1:
      if (st.excited && st.k < 0) return e0();
      if (!st.excited && in(st.k) && st.p < 0) return g1(st.k);
      break;
    case 2:
      if (st.excited && in(st.k) && st.p < 0) return e1(st.k);
      if (!st.excited && in(st.k) && in(st.p) && st.k <= st.p) return pair(st.k, st.p);
      break;
  }
  throw Error(ErrorKind::Parameter, "not a state of the two-excitation basis");
}

BasisState TwoExcBasis::decode(Eigen::Index i) const {
  if (i < 0 || i >= dim_) throw Error(ErrorKind::Parameter, "basis index out of range");
  if (i == 0) return {0, false, -1, -1};
  if (i == 1) return {1, true, -1, -1};
  if (i < 2 + n_) return {1, false, int(i - 2), -1};
  if (i < pair_begin()) return {2, true, int(i - 2 - n_), -1};
  Eigen::Index r = i - pair_begin();
  int k = 0;
  while (r >= n_ - k) {
    r -= n_ - k;
    ++k;
  }
  return {2, false, k, int(k + r)};
}

HamiltonianOperator::HamiltonianOperator(const TwoExcBasis& basis, const PolaronParams& params,
                                         const ModeGrid& grid, double max_bytes)
    : basis_(basis), w_(grid.omegas), f_(params.f), dt_(params.delta_tilde), d0_(params.delta0) {
  if (grid.n_modes != basis.n_modes() || params.f.size() != grid.n_modes)
    throw Error(ErrorKind::Parameter, "basis, grid and polaron parameters disagree on N");
  // propagation keeps a handful of state-sized work vectors
  double need = 8.0 * 16.0 * double(basis.dimension());
  if (need > max_bytes) throw Error(ErrorKind::Resource, "two-excitation space exceeds the memory budget", need);
}

void HamiltonianOperator::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  const int n = basis_.n_modes();
  const double r2 = std::numbers::sqrt2;
  out.resize(in.size());

  out(0) = -0.5 * dt_ * in(0);

  // one excitation
  cplx e0 = in(1);
  cplx fpsi = 0.0;
  for (int k = 0; k < n; ++k) fpsi += f_(k) * in(basis_.g1(k));
  out(1) = 0.5 * dt_ * e0 + d0_ * fpsi;
  for (int k = 0; k < n; ++k)
    out(basis_.g1(k)) = (w_(k) - 0.5 * dt_) * in(basis_.g1(k)) + d0_ * f_(k) * (e0 + fpsi);

  // two excitations: Psi(k,p) = c_kp (k<p), sqrt2 c_kk
  const Eigen::Index e1 = basis_.e1(0), pb = basis_.pair_begin();
  Eigen::VectorXcd pf = Eigen::VectorXcd::Zero(n);
  cplx fe = 0.0;
  for (int k = 0; k < n; ++k) fe += f_(k) * in(e1 + k);
  Eigen::Index idx = pb;
  for (int k = 0; k < n; ++k) {
    pf(k) += r2 * in(idx) * f_(k);
    ++idx;
    for (int p = k + 1; p < n; ++p, ++idx) {
      pf(k) += in(idx) * f_(p);
      pf(p) += in(idx) * f_(k);
    }
  }
  cplx fpf = 0.0;
  for (int k = 0; k < n; ++k) fpf += f_(k) * pf(k);

  for (int q = 0; q < n; ++q)
    out(e1 + q) = (0.5 * dt_ + w_(q)) * in(e1 + q) - d0_ * f_(q) * fe + d0_ * pf(q) - d0_ * f_(q) * fpf;

  idx = pb;
  for (int k = 0; k < n; ++k) {
    const cplx ek = in(e1 + k);
    {
      cplx psi = r2 * in(idx);
      cplx v = (2.0 * w_(k) - 0.5 * dt_) * psi + 2.0 * d0_ * f_(k) * pf(k) -
               2.0 * d0_ * f_(k) * f_(k) * (fpf + fe) + 2.0 * d0_ * f_(k) * ek;
      out(idx) = v / r2;
      ++idx;
    }
    for (int p = k + 1; p < n; ++p, ++idx) {
      const cplx psi = in(idx);
      out(idx) = (w_(k) + w_(p) - 0.5 * dt_) * psi + d0_ * (f_(k) * pf(p) + f_(p) * pf(k)) -
                 2.0 * d0_ * f_(k) * f_(p) * (fpf + fe) + d0_ * (f_(k) * in(e1 + p) + f_(p) * ek);
    }
  }
}

Eigen::MatrixXcd HamiltonianOperator::to_dense() const {
  Eigen::Index d = basis_.dimension();
  if (double(d) * double(d) * 16.0 > 2e9) throw Error(ErrorKind::Resource, "dense Hamiltonian too large");
  Eigen::MatrixXcd m(d, d);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d), col;
  for (Eigen::Index j = 0; j < d; ++j) {
    e(j) = 1.0;
    apply(e, col);
    m.col(j) = col;
    e(j) = 0.0;
  }
  return m;
}

void HamiltonianOperator::estimate_bounds(int steps) {
  Eigen::Index d = basis_.dimension();
  int m = int(std::min<Eigen::Index>(steps, d));
  // deterministic start vector touching every sector
  Eigen::VectorXcd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = cplx(1.0 + 0.37 * std::sin(1.3 * double(i)), 0.21 * std::cos(0.7 * double(i)));
  v.normalize();
  std::vector<Eigen::VectorXcd> q{v};
  Eigen::VectorXd a(m), b(m);
  Eigen::VectorXcd w;
  int used = 0;
  for (int j = 0; j < m; ++j) {
    apply(q[j], w);
    a(j) = q[j].dot(w).real();
    for (const auto& qq : q) w -= qq.dot(w) * qq;  // full reorthogonalization
    used = j + 1;
    double nb = w.norm();
    b(j) = nb;
    if (nb < 1e-12 || j + 1 == m) break;
    q.push_back(w / nb);
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(used, used);
  for (int j = 0; j < used; ++j) {
    t(j, j) = a(j);
    if (j + 1 < used) t(j, j + 1) = t(j + 1, j) = b(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  double pad = 0.05 * std::max(hi - lo, 1e-3);
  e_min_ = lo - pad;
  e_max_ = hi + pad;
}

Eigen::MatrixXcd unpack_pairs(const Eigen::VectorXcd& state, const TwoExcBasis& basis) {
  const int n = basis.n_modes();
  Eigen::MatrixXcd psi(n, n);
  Eigen::Index idx = basis.pair_begin();
  for (int k = 0; k < n; ++k) {
    psi(k, k) = std::numbers::sqrt2 * state(idx++);
    for (int p = k + 1; p < n; ++p, ++idx) psi(k, p) = psi(p, k) = state(idx);
  }
  return psi;
}

void pack_pairs(const Eigen::MatrixXcd& psi, const TwoExcBasis& basis, Eigen::VectorXcd& state) {
  const int n = basis.n_modes();
  Eigen::Index idx = basis.pair_begin();
  for (int k = 0; k < n; ++k) {
    state(idx++) = psi(k, k) / std::numbers::sqrt2;
    for (int p = k + 1; p < n; ++p, ++idx) state(idx) = 0.5 * (psi(k, p) + psi(p, k));
  }
}

ObservableRecord observables(const Eigen::VectorXcd& state, const TwoExcBasis& basis, double t) {
  const int n = basis.n_modes();
  ObservableRecord r;
  r.t = t;
  double s1 = 0.0, s2 = 0.0, pe = std::norm(state(1));
  for (Eigen::Index i = 1; i < basis.sector_begin(2); ++i) s1 += std::norm(state(i));
  for (Eigen::Index i = basis.sector_begin(2); i < basis.dimension(); ++i) s2 += std::norm(state(i));
  for (int k = 0; k < n; ++k) pe += std::norm(state(basis.e1(k)));
  r.p_e = pe;
  r.n_excit = s1 + 2.0 * s2;
  r.norm = state.norm();
  r.psi1 = state.segment(basis.g1(0), n);
  r.psi2 = unpack_pairs(state, basis);
  r.marginal = r.psi2.cwiseAbs2().rowwise().sum();
  return r;
}

Eigen::VectorXcd initial_state(const TwoExcBasis& basis, const std::vector<Wavepacket>& packets) {
  const int n = basis.n_modes();
  if (packets.empty() || packets.size() > 2) throw Error(ErrorKind::Parameter, "one or two packets expected");
  for (const auto& wp : packets) {
    if (wp.phi.size() != n) throw Error(ErrorKind::Parameter, "packet size does not match the grid");
    if (std::abs(wp.phi.norm() - 1.0) > 1e-10) throw Error(ErrorKind::Parameter, "packet is not normalized");
  }
  Eigen::VectorXcd st = Eigen::VectorXcd::Zero(basis.dimension());
  if (packets.size() == 1) {
    st.segment(basis.g1(0), n) = packets[0].phi;
    return st;
  }
  const auto& a = packets[0].phi;
  const auto& b = packets[1].phi;
  Eigen::MatrixXcd psi = a * b.transpose() + b * a.transpose();
  double nrm = std::sqrt(0.5 * psi.cwiseAbs2().sum());
  if (!(nrm > 0.0)) throw Error(ErrorKind::DegenerateInput, "two-photon product state vanishes");
  pack_pairs(psi / nrm, basis, st);
  return st;
}

Eigen::VectorXcd chebyshev_step(const Eigen::VectorXcd& psi, const HamiltonianOperator& h, double dt,
                                double tol, int* order) {
  if (!(h.e_max() > h.e_min())) throw Error(ErrorKind::Parameter, "spectral bounds not set");
  const double a = 0.5 * (h.e_max() - h.e_min());
  const double b = 0.5 * (h.e_max() + h.e_min());
  const double x = a * dt;
  // smallest order past the Bessel turning point with a negligible tail
  int m = std::max(4, int(std::ceil(x)));
  while (std::abs(std::cyl_bessel_j(double(m), x)) + std::abs(std::cyl_bessel_j(double(m + 1), x)) > 0.1 * tol)
    ++m;
  if (order) *order = m;

  const double nrm0 = psi.norm();
  auto scaled = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
    h.apply(v, out);
    out = (out - b * v) / a;
  };
  Eigen::VectorXcd t0 = psi, t1, t2, hv;
  scaled(t0, t1);
  Eigen::VectorXcd acc = std::cyl_bessel_j(0.0, x) * t0 + 2.0 * cplx(0.0, -1.0) * std::cyl_bessel_j(1.0, x) * t1;
  cplx ph(0.0, -1.0);
  for (int k = 2; k <= m; ++k) {
    scaled(t1, hv);
    t2 = 2.0 * hv - t0;
    ph *= cplx(0.0, -1.0);
    acc += 2.0 * ph * std::cyl_bessel_j(double(k), x) * t2;
    if (t2.norm() > 1.5 * nrm0 + 1e-300)
      throw Error(ErrorKind::Accuracy, "Chebyshev recursion diverged: spectral bounds too narrow", t2.norm());
    t0.swap(t1);
    t1.swap(t2);
  }
  return acc * std::polar(1.0, -b * dt);
}

std::vector<Snapshot> propagate(Eigen::VectorXcd& state, const HamiltonianOperator& h,
                                const PropagationOptions& opt) {
  if (!(opt.tol > 0.0)) throw Error(ErrorKind::Parameter, "tol must be positive");
  if (!(opt.t_final >= 0.0)) throw Error(ErrorKind::Parameter, "t_final must be >= 0");
  if (!(opt.dt_report > 0.0)) throw Error(ErrorKind::Parameter, "dt_report must be positive");
  const TwoExcBasis& basis = h.basis();
  std::vector<Snapshot> out;
  auto record = [&](double t) {
    Snapshot s{observables(state, basis, t), std::nullopt};
    if (opt.keep_states) s.state = state;
    out.push_back(std::move(s));
  };
  const double norm0 = state.norm();
  record(0.0);
  long steps = long(std::ceil(opt.t_final / opt.dt_report - 1e-9));
  for (long i = 1; i <= steps; ++i) {
    double t_prev = double(i - 1) * opt.dt_report;
    double t = std::min(opt.t_final, double(i) * opt.dt_report);
    state = chebyshev_step(state, h, t - t_prev, opt.tol);
    if (std::abs(state.norm() - norm0) > 1e-6 * std::max(norm0, 1.0))
      throw Error(ErrorKind::Accuracy, "norm drift: spectral bounds likely violated", state.norm() - norm0);
    record(t);
  }
  return out;
}

}  // namespace usc
