#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "usc/linres.hpp"
#include "usc/model.hpp"
#include "usc/polaron.hpp"
#include "usc/quadrature.hpp"

namespace usc {

struct ModelConfig {
  int n_modes = 128;
  double length = 201.06192982974676;  // 64 pi: spacing 1/32, band up to 4
  std::string dispersion = "linear";  // linear | sine
  double c = 1.0;
  std::string cutoff = "hard";  // hard | exponential
  double omega_c = 4.0;
  double alpha = 0.12;
  double delta = 1.0;
  bool operator==(const ModelConfig&) const = default;
};

struct PolaronConfig {
  double tol = 1e-12;
  int max_iter = 10000;
  double damping = 0.5;
  bool operator==(const PolaronConfig&) const = default;
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  long max_evals = 2000000;
  double eta = 1e-6;
  bool operator==(const QuadratureConfig&) const = default;
};

struct ScatterConfig {
  std::string sigma_source = "grid";  // grid | closed | discrete
  double eta_factor = 4.0;            // discrete broadening in units of the level spacing
  std::optional<double> e_total;      // scatter2 total energy, default 2 * delta_tilde
  bool full_table = false;
  QuadratureConfig quadrature;
  bool operator==(const ScatterConfig&) const = default;
};

struct PacketConfig {
  std::optional<double> mu;  // default delta_tilde
  double s = 0.01;
  double x = -15.0;
  bool operator==(const PacketConfig&) const = default;
};

struct DynamicsConfig {
  std::vector<PacketConfig> packets{PacketConfig{}};
  double t_final = 60.0;
  double dt_report = 0.25;
  double tol = 1e-10;
  bool dump_amplitudes = true;
  bool operator==(const DynamicsConfig&) const = default;
};

struct OracleConfig {
  int max_photons = 3;
  long budget = 4096;
  double t_final = 20.0;
  double dt_report = 0.25;
  bool operator==(const OracleConfig&) const = default;
};

struct SweepConfig {
  std::vector<double> alphas{0.02, 0.06, 0.10, 0.14};
  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  ModelConfig model;
  PolaronConfig polaron;
  ScatterConfig scatter;
  DynamicsConfig dynamics;
  OracleConfig oracle;
  SweepConfig sweep;
  OutputConfig output;
  bool operator==(const ExperimentConfig&) const = default;
};

// Throws Error(Config) naming the offending key; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json emit_config(const ExperimentConfig& cfg);

ModeGrid grid_from_config(const ModelConfig& m);
PolaronOptions polaron_options(const PolaronConfig& p);
QuadratureSpec quadrature_spec(const QuadratureConfig& q);
// plain records for pipelines; complex amplitudes as [re, im] pairs
nlohmann::json grid_record(const ModeGrid& grid);
nlohmann::json wavepacket_record(const Wavepacket& wp);

SelfEnergyModel sigma_from_config(const ScatterConfig& s, const PolaronParams& params, const ModeGrid& grid);

}  // namespace usc
