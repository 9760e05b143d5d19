#include "usc/oracle.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "usc/errors.hpp"

namespace usc {

long FockTruncation::dimension() const {
  long d = 2;
  for (int k = 0; k < n_modes; ++k) {
    d *= (max_photons + 1);
    if (d > (1L << 40)) break;
  }
  return d;
}

FockSpace::FockSpace(const FockTruncation& t) : trunc_(t) {
  if (t.n_modes < 1) throw Error(ErrorKind::Parameter, "oracle needs at least one mode");
  if (t.max_photons < 1) throw Error(ErrorKind::Parameter, "oracle needs max_photons >= 1");
  if (t.dimension() > t.budget)
    throw Error(ErrorKind::Resource, "truncated Fock space exceeds the oracle budget", double(t.dimension()));
  stride_.resize(t.n_modes);
  nb_ = 1;
  for (int k = 0; k < t.n_modes; ++k) {
    stride_[k] = nb_;
    nb_ *= (t.max_photons + 1);
  }
  dim_ = 2 * nb_;
}

int FockSpace::occupation(long b, int mode) const { return int((b / stride_[mode]) % (trunc_.max_photons + 1)); }

long FockSpace::index(bool excited, const std::vector<int>& occ) const {
  long i = excited ? nb_ : 0;
  for (int k = 0; k < trunc_.n_modes; ++k) i += long(occ.at(k)) * stride_[k];
  return i;
}

Eigen::MatrixXd FockSpace::annihilator(int mode) const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nb_, nb_);
  for (long b = 0; b < nb_; ++b) {
    int n = occupation(b, mode);
    if (n > 0) a(b - stride_[mode], b) = std::sqrt(double(n));
  }
  return a;
}

Eigen::MatrixXd spin_boson_hamiltonian(const FockSpace& fs, const ModeGrid& grid, double delta) {
  const int n = fs.truncation().n_modes;
  if (grid.n_modes != n) throw Error(ErrorKind::Parameter, "grid and truncation disagree on N");
  const long nb = fs.boson_dimension();
  Eigen::MatrixXd hb = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(nb, nb);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd a = fs.annihilator(k);
    hb += grid.omegas(k) * (a.transpose() * a);
    x += grid.g(k) * (a + a.transpose());
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
  h.topLeftCorner(nb, nb) = hb - 0.5 * delta * Eigen::MatrixXd::Identity(nb, nb);
  h.bottomRightCorner(nb, nb) = hb + 0.5 * delta * Eigen::MatrixXd::Identity(nb, nb);
  h.topRightCorner(nb, nb) = x;
  h.bottomLeftCorner(nb, nb) = x;
  return h;
}

Eigen::MatrixXd polaron_unitary(const FockSpace& fs, const Eigen::VectorXd& f) {
  const long nb = fs.boson_dimension();
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(nb, nb);
  for (int k = 0; k < fs.truncation().n_modes; ++k) {
    Eigen::MatrixXd a = fs.annihilator(k);
    gen += f(k) * (a.transpose() - a);
  }
  Eigen::MatrixXd ep = gen.exp();
  Eigen::MatrixXd em = (-gen).exp();
  // exp(-sx G) = cosh G - sx sinh G
  Eigen::MatrixXd ch = 0.5 * (ep + em), sh = 0.5 * (ep - em);
  Eigen::MatrixXd u(2 * nb, 2 * nb);
  u << ch, -sh, -sh, ch;
  return u;
}

namespace {

double top_population(const FockSpace& fs, const Eigen::VectorXcd& v) {
  double p = 0.0;
  const int nmax = fs.truncation().max_photons;
  for (long i = 0; i < fs.dimension(); ++i) {
    long b = i % fs.boson_dimension();
    for (int k = 0; k < fs.truncation().n_modes; ++k) {
      if (fs.occupation(b, k) == nmax) {
        p += std::norm(v(i));
        break;
      }
    }
  }
  return p;
}

}  // namespace

GroundResult exact_ground(const ModeGrid& grid, double delta, const FockTruncation& trunc) {
  FockTruncation t = trunc;
  t.n_modes = grid.n_modes;
  FockSpace fs(t);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spin_boson_hamiltonian(fs, grid, delta));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Convergence, "dense eigensolver failed");
  GroundResult g;
  g.energy = es.eigenvalues()(0);
  g.vector = es.eigenvectors().col(0);
  g.top_level_population = top_population(fs, g.vector.cast<std::complex<double>>());
  return g;
}

Eigen::VectorXcd oracle_polaron_state(const FockSpace& fs, bool excited, const Eigen::VectorXcd* phi) {
  const int n = fs.truncation().n_modes;
  Eigen::VectorXcd st = Eigen::VectorXcd::Zero(fs.dimension());
  std::vector<int> occ(n, 0);
  if (!phi) {
    st(fs.index(excited, occ)) = 1.0;
    return st;
  }
  if (phi->size() != n) throw Error(ErrorKind::Parameter, "packet size does not match the truncation");
  for (int k = 0; k < n; ++k) {
    occ.assign(n, 0);
    occ[k] = 1;
    st(fs.index(excited, occ)) = (*phi)(k);
  }
  return st;
}

EvolveResult exact_evolve(const ModeGrid& grid, const PolaronParams& params, const FockTruncation& trunc,
                          const Eigen::VectorXcd& psi_p, const std::vector<double>& times) {
  FockTruncation t = trunc;
  t.n_modes = grid.n_modes;
  FockSpace fs(t);
  if (psi_p.size() != fs.dimension()) throw Error(ErrorKind::Parameter, "state does not match the truncation");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spin_boson_hamiltonian(fs, grid, params.delta));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Convergence, "dense eigensolver failed");
  Eigen::MatrixXd u = polaron_unitary(fs, params.f);
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd c = v.transpose().cast<std::complex<double>>() * (u.cast<std::complex<double>>() * psi_p);

  const long nb = fs.boson_dimension();
  EvolveResult res;
  for (double tt : times) {
    Eigen::VectorXcd ph(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) ph(i) = c(i) * std::polar(1.0, -es.eigenvalues()(i) * tt);
    Eigen::VectorXcd lab = v.cast<std::complex<double>>() * ph;
    Eigen::VectorXcd pol = u.transpose().cast<std::complex<double>>() * lab;
    OracleRecord r;
    r.t = tt;
    double pe = pol.tail(nb).squaredNorm();
    double nph = 0.0;
    for (long i = 0; i < fs.dimension(); ++i) {
      long b = i % nb;
      int occ = 0;
      for (int k = 0; k < t.n_modes; ++k) occ += fs.occupation(b, k);
      nph += occ * std::norm(pol(i));
    }
    r.p_e = pe;
    r.n_excit = pe + nph;
    res.records.push_back(r);
    res.max_top_level_population = std::max(res.max_top_level_population, top_population(fs, lab));
  }
  res.leakage_warning = res.max_top_level_population > 1e-4;
  return res;
}

}  // namespace usc
