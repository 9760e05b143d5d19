#include "usc/twophoton.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "usc/errors.hpp"

namespace usc {

namespace {

// Lorentzian-like features of G on the real axis: zeros of Re h with their widths.
std::vector<double> resonance_points(const SelfEnergyModel& s) {
  std::vector<double> pts;
  double dt = s.delta_tilde();
  auto reh = [&](double w) { return h_denominator(cplx(w, 0.0), s).real(); };
  const int n = 120;
  double lo = -2.0 * dt, hi = 4.0 * dt;
  double prev = reh(lo);
  for (int i = 1; i <= n; ++i) {
    double w = lo + (hi - lo) * i / n;
    double cur = reh(w);
    if (prev * cur < 0.0) {
      double a = lo + (hi - lo) * (i - 1) / n;
      double r = find_resonance(s, a, w);
      double width = std::abs(h_denominator(cplx(r, 0.0), s).imag());
      pts.push_back(r);
      for (double m : {1.0, 4.0, 16.0}) {
        if (width > 0.0) {
          pts.push_back(r - m * width);
          pts.push_back(r + m * width);
        }
      }
    }
    prev = cur;
  }
  return pts;
}

std::vector<double> breakpoints(cplx z, const SelfEnergyModel& s) {
  std::vector<double> base = s.features();
  auto res = resonance_points(s);
  base.insert(base.end(), res.begin(), res.end());
  base.push_back(s.delta_tilde());
  std::vector<double> out = base;
  for (double x : base) out.push_back(z.real() - x);
  return out;
}

}  // namespace

Pi2Matrix pi2_matrix(cplx z, const SelfEnergyModel& s, const QuadratureSpec& quad, bool full_table) {
  using std::numbers::pi;
  if (s.alpha() >= 0.5) throw Error(ErrorKind::Domain, "Pi2 requires alpha < 0.5");
  if (z.imag() < 0.0) throw Error(ErrorKind::Domain, "Pi2 is evaluated for Im z >= 0");
  const double eta = quad.eta;
  const cplx pre(0.0, 1.0 / (2.0 * pi));
  auto bp = breakpoints(z, s);
  Pi2Matrix out;
  out.z = z;

  if (!full_table) {
    auto f = [&](double w) {
      GreenBF a = green_bf(cplx(w, eta), s);
      GreenBF b = green_bf(cplx(z.real() - w, z.imag() + eta), s);
      CArray<6> v;
      v << a.bb * b.bb, a.bb * b.bF, a.bF * b.bF, a.bb * b.FF, a.bF * b.FF, a.FF * b.FF;
      return v;
    };
    auto r = integrate_line<6>(f, bp, quad);
    CArray<6> c = r.value * pre;
    Eigen::Matrix3cd& m = out.m;
    m(0, 0) = 2.0 * c(0);
    m(0, 1) = m(1, 0) = 2.0 * c(1);
    m(0, 2) = m(2, 0) = 2.0 * c(2);
    m(1, 1) = c(3) + c(2);
    m(1, 2) = m(2, 1) = 2.0 * c(4);
    m(2, 2) = 2.0 * c(5);
    out.error = 2.0 * r.error / (2.0 * pi);
    out.evals = r.evals;
    out.converged = r.converged;
  } else {
    auto f = [&](double w) {
      Eigen::Matrix2cd a = green_bf_dyson(cplx(w, eta), s);
      Eigen::Matrix2cd b = green_bf_dyson(cplx(z.real() - w, z.imag() + eta), s);
      const cplx bb = a(0, 0), bF = a(0, 1), Fb = a(1, 0), FF = a(1, 1);
      const cplx bb2 = b(0, 0), bF2 = b(0, 1), Fb2 = b(1, 0), FF2 = b(1, 1);
      CArray<10> v;
      v << bb * bb2, bb * bF2, bF * bF2, bb * Fb2, bb * FF2, bF * bF2, bF * FF2, Fb * Fb2, Fb * FF2,
          FF * FF2;
      return v;
    };
    auto r = integrate_line<10>(f, bp, quad);
    CArray<10> c = r.value * pre;
    Eigen::Matrix3cd& m = out.m;
    m << 2.0 * c(0), 2.0 * c(1), 2.0 * c(2),
         2.0 * c(3), c(4) + c(5), 2.0 * c(6),
         2.0 * c(7), 2.0 * c(8), 2.0 * c(9);
    out.error = 2.0 * r.error / (2.0 * pi);
    out.evals = r.evals;
    out.converged = r.converged;
  }
  if (!out.converged)
    throw Error(ErrorKind::Accuracy, "Pi2 quadrature did not reach tolerance", out.error);
  return out;
}

Eigen::Matrix3cd u2(double d0, double u0) {
  Eigen::Matrix3cd u = Eigen::Matrix3cd::Zero();
  u(0, 0) = u0;
  u(1, 1) = -2.0 * d0;
  u(1, 2) = u(2, 1) = -d0;
  u(2, 2) = -d0;
  return u;
}

Eigen::Matrix3cd u2_inverse_hardcore(double d0) {
  Eigen::Matrix3cd ui = Eigen::Matrix3cd::Zero();
  ui(1, 1) = -1.0 / d0;
  ui(1, 2) = ui(2, 1) = 1.0 / d0;
  ui(2, 2) = -2.0 / d0;
  return ui;
}

Eigen::Matrix3cd t_matrix_2(const Pi2Matrix& pi2, double d0, std::optional<double> u0) {
  Eigen::Matrix3cd ui = u0 ? Eigen::Matrix3cd(u2(d0, *u0).inverse()) : u2_inverse_hardcore(d0);
  Eigen::Matrix3cd a = ui - pi2.m;
  cplx det = a.determinant();
  double scale = std::pow(std::max(a.cwiseAbs().maxCoeff(), 1e-300), 3);
  if (!(std::abs(det) > 1e-14 * scale))
    throw Error(ErrorKind::Singularity, "u2^-1 - Pi2 is singular", std::abs(det));
  return a.inverse();
}

BoundaryVector boundary_vector(int k1, int k2, const PolaronParams& params, const ModeGrid& grid,
                               const SelfEnergyModel& s) {
  if (k1 < 0 || k2 < 0 || k1 >= grid.n_modes || k2 >= grid.n_modes)
    throw Error(ErrorKind::Parameter, "mode index out of range");
  double dt = s.delta_tilde(), d0 = s.delta0();
  auto leg = [&](int k, cplx& a, cplx& b) {
    double w = grid.omegas(k);
    cplx h = h_denominator(cplx(w, 0.0), s);
    if (h == 0.0) throw Error(ErrorKind::Singularity, "h vanishes on a boundary leg");
    a = (w - dt) * params.f(k) / h;
    b = d0 * params.f(k) / h;
  };
  BoundaryVector bv;
  leg(k1, bv.alpha1, bv.beta1);
  leg(k2, bv.alpha2, bv.beta2);
  bv.E = grid.omegas(k1) + grid.omegas(k2);
  bv.eps = grid.omegas(k1) - grid.omegas(k2);
  bv.v << 2.0 * bv.beta1 * bv.beta2, bv.alpha1 * bv.beta2 + bv.beta1 * bv.alpha2,
      2.0 * bv.alpha1 * bv.alpha2;
  double x = bv.E - 2.0 * dt;
  bv.v_closed << 2.0, x / d0, (x * x - bv.eps * bv.eps) / (2.0 * d0 * d0);
  bv.v_closed *= bv.beta1 * bv.beta2;
  return bv;
}

Pi2Matrix Pi2Cache::get(cplx z) {
  std::pair<double, double> key{z.real(), z.imag()};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
  }
  Pi2Matrix p = pi2_matrix(z, s_, quad_);
  std::lock_guard<std::mutex> lock(mu_);
  return table_.emplace(key, p).first->second;
}

std::size_t Pi2Cache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_.size();
}

cplx s_correlated(int p1, int p2, int k1, int k2, const PolaronParams& params, const ModeGrid& grid,
                  Pi2Cache& cache) {
  const SelfEnergyModel& s = cache.sigma();
  BoundaryVector vi = boundary_vector(k1, k2, params, grid, s);
  BoundaryVector vf = boundary_vector(p1, p2, params, grid, s);
  Eigen::Matrix3cd t = t_matrix_2(cache.get(cplx(vi.E, 0.0)), s.delta0());
  return vf.v.transpose() * t * vi.v;
}

cplx s_uncorrelated(int p1, int p2, int k1, int k2, const ScatterResult1& sc) {
  double d = (p1 == k1 && p2 == k2 ? 1.0 : 0.0) + (p2 == k1 && p1 == k2 ? 1.0 : 0.0);
  if (d == 0.0) return 0.0;
  return sc.s(k1) * sc.s(k2) * d;
}

double shell_spacing(const ModeGrid& grid) {
  if (!grid.uniform()) throw Error(ErrorKind::Parameter, "energy shells need a uniform (linear) grid");
  return grid.level_spacing(0);
}

Eigen::MatrixXcd predict_correlated(const Eigen::MatrixXcd& psi_in, const PolaronParams& params,
                                    const ModeGrid& grid, Pi2Cache& cache, double threshold, int jobs) {
  using std::numbers::pi;
  const int n = grid.n_modes;
  if (psi_in.rows() != n || psi_in.cols() != n)
    throw Error(ErrorKind::Parameter, "input pair amplitude does not match the grid");
  const double de = shell_spacing(grid);
  const SelfEnergyModel& s = cache.sigma();
  const double dt = s.delta_tilde(), d0 = s.delta0();

  Eigen::VectorXcd beta(n);
  for (int k = 0; k < n; ++k) {
    cplx h = h_denominator(cplx(grid.omegas(k), 0.0), s);
    beta(k) = d0 * params.f(k) / h;
  }
  // reduced boundary vector; the full one is this times beta_1 beta_2
  auto reduced = [&](int a, int b) {
    double x = grid.omegas(a) + grid.omegas(b) - 2.0 * dt;
    double e = grid.omegas(a) - grid.omegas(b);
    Eigen::Vector3cd v;
    v << 2.0, x / d0, (x * x - e * e) / (2.0 * d0 * d0);
    return v;
  };

  const double cut = threshold * psi_in.cwiseAbs().maxCoeff();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (int shell = next++; shell <= 2 * n - 2; shell = next++) {
      int lo = std::max(0, shell - (n - 1)), hi = std::min(n - 1, shell);
      double peak = 0.0;
      for (int a = lo; a <= hi; ++a) peak = std::max(peak, std::abs(psi_in(a, shell - a)));
      if (peak < cut || peak == 0.0) continue;
      try {
        double e = grid.omegas(lo) + grid.omegas(shell - lo);
        Eigen::Matrix3cd t = t_matrix_2(cache.get(cplx(e, 0.0)), d0);
        Eigen::Vector3cd w = Eigen::Vector3cd::Zero();
        for (int a = lo; a <= hi; ++a) w += reduced(a, shell - a) * beta(a) * beta(shell - a) * psi_in(a, shell - a);
        Eigen::RowVector3cd tw = (t * w).transpose();
        const cplx pre = 0.5 * cplx(0.0, -2.0 * pi / de);
        for (int a = lo; a <= hi; ++a) {
          int b = shell - a;
          out(a, b) = pre * beta(a) * beta(b) * (tw * reduced(a, b)).value();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int nj = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < nj; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace usc
