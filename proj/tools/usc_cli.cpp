#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "usc/config.hpp"
#include "usc/errors.hpp"
#include "usc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ultrastrong waveguide QED simulator"};
  app.set_version_flag("--version", std::string(usc::kVersion));
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path, out_dir, mode;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON config file (defaults if omitted)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  for (const char* name : {"polaron", "scatter1", "scatter2", "dynamics", "chainmap", "sweep"})
    app.add_subcommand(name);
  auto* oracle = app.add_subcommand("oracle", "exact truncated-Fock reference");
  oracle->add_option("mode", mode, "ground | evolve | compare-dynamics")
      ->required()
      ->check(CLI::IsMember({"ground", "evolve", "compare-dynamics"}));
  app.add_subcommand("defaults", "print the fully resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  usc::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = usc::parse_config(ss.str());
    }
  } catch (const usc::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return usc::exit_code(e.kind());
  }

  std::string sub = app.get_subcommands().front()->get_name();
  if (sub == "defaults") {
    std::cout << usc::emit_config(cfg).dump(2) << '\n';
    return 0;
  }
  usc::RunRequest req{sub, mode, out_dir, jobs};
  usc::RunOutcome res = usc::run_experiment(cfg, req);
  if (res.exit_code != 0) std::cerr << sub << " failed: " << res.error << '\n';
  return res.exit_code;
}
