#pragma once

#include <string>
#include <vector>

#include "usc/config.hpp"

namespace usc {

inline constexpr const char* kVersion = "1.0.0";

struct RunRequest {
  std::string subcommand;  // polaron scatter1 scatter2 dynamics chainmap oracle sweep
  std::string mode;        // oracle: ground | evolve | compare-dynamics
  std::string out_dir;     // overrides output.directory when non-empty
  int jobs = 1;
};

struct RunOutcome {
  int exit_code = 0;
  std::string error;
  std::vector<std::string> files;
};

// Writes CSV artifacts plus manifest.json into the output directory. Module errors
// are caught, recorded in the manifest and mapped to exit codes.
RunOutcome run_experiment(const ExperimentConfig& cfg, const RunRequest& req);

// %.17g
std::string num(double x);

}  // namespace usc
