#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "usc/config.hpp"
#include "usc/errors.hpp"
#include "usc/experiment.hpp"

using namespace usc;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("usc_unit_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config: minimal document resolves all defaults") {
  ExperimentConfig c = parse_config(R"({"model": {}})");
  CHECK(c == ExperimentConfig{});
  nlohmann::json e = emit_config(c);
  for (const char* s : {"model", "polaron", "scatter", "dynamics", "oracle", "sweep", "output"})
    CHECK(e.contains(s));
  CHECK(e["scatter"]["quadrature"]["rel_tol"] == 1e-8);
}

TEST_CASE("config: validation messages name the key") {
  CHECK(message_of(R"({"model": {"alpha": 0.6}})").find("alpha must be in [0, 0.49]") != std::string::npos);
  CHECK(message_of(R"({"model": {"alpha": 0.6}})").find("model.alpha") == 0);
  CHECK(message_of(R"({"model": {"colour": 1}})") == "model.colour: unknown key");
  CHECK(message_of(R"({"polaron": {}})").find("model") == 0);
  CHECK(message_of(R"({"model": {}, "extra": 1})").find("config.extra") == 0);
  CHECK(message_of(R"({"model": {"n_modes": 2.5}})").find("model.n_modes") == 0);
  CHECK(message_of(R"({"model": {}, "dynamics": {"packets": [{"s": -1}]}})").find("dynamics.packets[0].s") == 0);
  CHECK(message_of("{not json").find("not valid JSON") != std::string::npos);
}

TEST_CASE("config: round trip") {
  ExperimentConfig c;
  c.model.alpha = 0.3;
  c.model.cutoff = "exponential";
  c.scatter.e_total = 2.25;
  c.scatter.sigma_source = "closed";
  c.dynamics.packets = {PacketConfig{1.1, 0.02, -10.0}, PacketConfig{std::nullopt, 0.03, -12.0}};
  c.sweep.alphas = {0.01, 0.2};
  c.output.directory = "elsewhere";
  CHECK(parse_config(emit_config(c).dump()) == c);
  ExperimentConfig d;
  CHECK(parse_config(emit_config(d).dump(2)) == d);
}

TEST_CASE("config: records for grids and packets") {
  ExperimentConfig c;
  ModeGrid g = grid_from_config(c.model);
  nlohmann::json r = grid_record(g);
  CHECK(r["n_modes"] == 128);
  CHECK(r["omegas"].size() == 128);
  CHECK(r["cutoff"]["kind"] == "hard");
  Wavepacket wp = gaussian_wavepacket(g, 1.0, 0.01, -3.0);
  nlohmann::json w = wavepacket_record(wp);
  CHECK(w["phi"].size() == 128);
  CHECK(w["phi"][5][1].get<double>() == wp.phi(5).imag());
}

TEST_CASE("run: scatter1 on defaults") {
  ExperimentConfig c;
  fs::path d = scratch("scatter1");
  RunOutcome r = run_experiment(c, {"scatter1", "", d.string(), 1});
  REQUIRE(r.exit_code == 0);
  auto l = lines(d / "scatter1.csv");
  REQUIRE(l.size() == 129);
  CHECK(l[0] == "omega,re_s,im_s,abs_t2,abs_r2,lamb_shift,gamma");
  auto man = nlohmann::json::parse(std::ifstream(d / "manifest.json"));
  CHECK(man["status"] == "ok");
  CHECK(man["config"] == emit_config(c));
  CHECK(man["version"] == kVersion);
  CHECK(man.contains("generated_at"));
  CHECK(man["results"]["polaron"]["residual"].get<double>() < 1e-11);
}

TEST_CASE("run: dynamics with zero duration") {
  ExperimentConfig c;
  c.dynamics.t_final = 0.0;
  fs::path d = scratch("dyn0");
  RunOutcome r = run_experiment(c, {"dynamics", "", d.string(), 1});
  REQUIRE(r.exit_code == 0);
  auto l = lines(d / "dynamics.csv");
  REQUIRE(l.size() == 2);
  std::stringstream row(l[1]);
  std::vector<double> v;
  for (std::string c; std::getline(row, c, ',');) v.push_back(std::stod(c));
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v[3] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("run: alpha sweep") {
  ExperimentConfig c;
  fs::path d = scratch("sweep");
  RunOutcome r = run_experiment(c, {"sweep", "", d.string(), 2});
  REQUIRE(r.exit_code == 0);
  double prev = 2.0;
  for (int i = 0; i < 4; ++i) {
    fs::path m = d / ("sweep_0" + std::to_string(i)) / "manifest.json";
    REQUIRE(fs::exists(m));
    auto j = nlohmann::json::parse(std::ifstream(m));
    double dt = j["results"]["polaron"]["delta_tilde"];
    CHECK(dt < prev);
    prev = dt;
  }
  CHECK(lines(d / "sweep.csv").size() == 5);
}

TEST_CASE("run: module errors map to exit codes") {
  ExperimentConfig c;
  c.polaron.max_iter = 1;
  c.polaron.tol = 1e-15;
  fs::path d = scratch("err");
  RunOutcome r = run_experiment(c, {"polaron", "", d.string(), 1});
  CHECK(r.exit_code == 3);
  auto man = nlohmann::json::parse(std::ifstream(d / "manifest.json"));
  CHECK(man["status"] == "error");
  CHECK(man["error_kind"] == kind_name(ErrorKind::Convergence));

  ExperimentConfig big;
  big.model.n_modes = 12000;
  big.model.length = 12000.0;
  big.model.omega_c = 100.0;
  fs::path d2 = scratch("res");
  CHECK(run_experiment(big, {"dynamics", "", d2.string(), 1}).exit_code == 5);
  CHECK(run_experiment(c, {"nonsense", "", d2.string(), 1}).exit_code == 2);
}
