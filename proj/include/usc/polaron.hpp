#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "usc/model.hpp"

namespace usc {

struct PolaronOptions {
  double tol = 1e-12;  // relative to delta
  int max_iter = 10000;
  double damping = 0.5;
  std::optional<double> initial;  // starting gap, defaults to delta
};

struct PolaronParams {
  Eigen::VectorXd f;
  double delta = 1.0;
  double delta_tilde = 1.0;
  double theta = 0.0;
  double delta0 = 2.0;
  double e0 = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  bool used_bisection = false;
  std::vector<std::string> warnings;

  // <0|H_P|0>
  double vacuum_energy() const { return -0.5 * delta_tilde + e0; }
};

constexpr double kAlphaMax = 0.49;
constexpr double kAlphaWarn = 0.3;

// Damped fixed point of x -> delta exp(-2 sum g^2/(w+x)^2), bisection fallback.
PolaronParams solve_polaron(const ModeGrid& grid, double delta = 1.0, const PolaronOptions& opt = {});

// Fills f, theta, delta0, e0 for a given gap (no iteration).
PolaronParams polaron_at(const ModeGrid& grid, double delta, double delta_tilde);

}  // namespace usc
