#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "usc/model.hpp"
#include "usc/polaron.hpp"

namespace usc {

struct BasisState {
  int sector = 0;       // number of excitations
  bool excited = false;  // qubit in |e>
  int k = -1;
  int p = -1;            // second photon, k <= p
  bool operator==(const BasisState&) const = default;
};

// |g;0>, |e;0>, |g;1_k>, |e;1_k>, |g;1_k 1_p> (k <= p)
class TwoExcBasis {
 public:
  explicit TwoExcBasis(int n_modes);
  int n_modes() const { return n_; }
  Eigen::Index dimension() const { return dim_; }
  Eigen::Index vacuum() const { return 0; }
  Eigen::Index e0() const { return 1; }
  Eigen::Index g1(int k) const { return 2 + k; }
  Eigen::Index e1(int k) const { return 2 + n_ + k; }
  Eigen::Index pair(int k, int p) const;
  Eigen::Index pair_begin() const { return 2 + 2 * Eigen::Index(n_); }
  // sector boundaries: [0,1), [1, 2+N), [2+N, dim)
  Eigen::Index sector_begin(int sector) const;
  Eigen::Index encode(const BasisState& st) const;
  BasisState decode(Eigen::Index i) const;

 private:
  int n_;
  Eigen::Index dim_;
};

inline TwoExcBasis enumerate_basis(const ModeGrid& grid) { return TwoExcBasis(grid.n_modes); }

// Number-conserving polaron Hamiltonian in the <= 2 excitation hardcore sector,
// energies relative to the vacuum shift E0.
class HamiltonianOperator {
 public:
  HamiltonianOperator(const TwoExcBasis& basis, const PolaronParams& params, const ModeGrid& grid,
                      double max_bytes = 4e9);
  const TwoExcBasis& basis() const { return basis_; }
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& in) const {
    Eigen::VectorXcd out;
    apply(in, out);
    return out;
  }
  Eigen::MatrixXcd to_dense() const;

  // Lanczos extremal Ritz values padded by 5% of the width
  void estimate_bounds(int steps = 40);
  void set_bounds(double lo, double hi) {
    e_min_ = lo;
    e_max_ = hi;
  }
  double e_min() const { return e_min_; }
  double e_max() const { return e_max_; }

 private:
  TwoExcBasis basis_;
  Eigen::VectorXd w_, f_;
  double dt_, d0_;
  double e_min_ = 0.0, e_max_ = 0.0;
};

struct ObservableRecord {
  double t = 0.0;
  double p_e = 0.0;
  double n_excit = 0.0;
  double norm = 0.0;
  Eigen::VectorXcd psi1;
  Eigen::MatrixXcd psi2;  // full symmetric pair amplitude (sqrt 2 on the diagonal)
  Eigen::VectorXd marginal;  // F(w_k) = sum_p |psi2(k, p)|^2
};

ObservableRecord observables(const Eigen::VectorXcd& state, const TwoExcBasis& basis, double t = 0.0);

// full symmetric Psi(k,p) <-> packed pair amplitudes
Eigen::MatrixXcd unpack_pairs(const Eigen::VectorXcd& state, const TwoExcBasis& basis);
void pack_pairs(const Eigen::MatrixXcd& psi, const TwoExcBasis& basis, Eigen::VectorXcd& state);

// One packet: amplitudes on |g;1_k>. Two packets: Psi = phi1 phi2^T + phi2 phi1^T, normalized.
Eigen::VectorXcd initial_state(const TwoExcBasis& basis, const std::vector<Wavepacket>& packets);

struct PropagationOptions {
  double t_final = 0.0;
  double dt_report = 0.25;
  double tol = 1e-10;
  bool keep_states = false;
};

struct Snapshot {
  ObservableRecord obs;
  std::optional<Eigen::VectorXcd> state;
};

// Chebyshev expansion of exp(-i H dt) between report times.
std::vector<Snapshot> propagate(Eigen::VectorXcd& state, const HamiltonianOperator& h,
                                const PropagationOptions& opt);

// Single step exp(-i H dt) psi, order chosen for tol.
Eigen::VectorXcd chebyshev_step(const Eigen::VectorXcd& psi, const HamiltonianOperator& h, double dt,
                                double tol, int* order = nullptr);

}  // namespace usc
