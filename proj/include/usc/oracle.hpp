#pragma once

#include <Eigen/Dense>
#include <vector>

#include "usc/model.hpp"
#include "usc/polaron.hpp"

namespace usc {

struct FockTruncation {
  int n_modes = 0;
  int max_photons = 3;  // per mode
  long budget = 4096;   // largest allowed dimension

  long dimension() const;
};

// Qubit (g, e) times occupation numbers, mixed radix with mode 0 fastest; index 0 is |g;0>.
class FockSpace {
 public:
  explicit FockSpace(const FockTruncation& trunc);
  long dimension() const { return dim_; }
  long boson_dimension() const { return nb_; }
  int occupation(long boson_index, int mode) const;
  long index(bool excited, const std::vector<int>& occ) const;
  const FockTruncation& truncation() const { return trunc_; }

  // a_k and the displacement generator sum_k f_k (a_k^dag - a_k) on the boson factor
  Eigen::MatrixXd annihilator(int mode) const;

 private:
  FockTruncation trunc_;
  long nb_ = 1, dim_ = 2;
  std::vector<long> stride_;
};

// Delta/2 sz + sum w n + sz-free coupling sigma_x sum g (a + a^dag), sz(e) = +1
Eigen::MatrixXd spin_boson_hamiltonian(const FockSpace& fs, const ModeGrid& grid, double delta);

// exp(-sigma_x sum f (a^dag - a)) inside the truncated space (exactly unitary there)
Eigen::MatrixXd polaron_unitary(const FockSpace& fs, const Eigen::VectorXd& f);

struct GroundResult {
  double energy = 0.0;
  Eigen::VectorXd vector;
  double top_level_population = 0.0;
};
GroundResult exact_ground(const ModeGrid& grid, double delta, const FockTruncation& trunc);

// Polaron-frame state |g or e> x (vacuum or one photon in packet phi).
Eigen::VectorXcd oracle_polaron_state(const FockSpace& fs, bool excited, const Eigen::VectorXcd* phi);

struct OracleRecord {
  double t = 0.0;
  double p_e = 0.0;
  double n_excit = 0.0;
};

struct EvolveResult {
  std::vector<OracleRecord> records;
  double max_top_level_population = 0.0;
  bool leakage_warning = false;
};

// Prepares U_P psi_P in the lab frame, evolves with the dense spin-boson Hamiltonian
// and measures in the polaron frame.
EvolveResult exact_evolve(const ModeGrid& grid, const PolaronParams& params, const FockTruncation& trunc,
                          const Eigen::VectorXcd& psi_polaron, const std::vector<double>& times);

}  // namespace usc
