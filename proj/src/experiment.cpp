#include "usc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "usc/chainmap.hpp"
#include "usc/dynamics.hpp"
#include "usc/errors.hpp"
#include "usc/linres.hpp"
#include "usc/oracle.hpp"
#include "usc/polaron.hpp"
#include "usc/twophoton.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace usc {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

class Csv {
 public:
  explicit Csv(const fs::path& p) : out_(p), path_(p) {
    if (!out_) throw Error(ErrorKind::Resource, "cannot write " + p.string());
  }
  Csv& header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << '\n';
    return *this;
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(v), first = false), ...);
    out_ << '\n';
  }
  void row_vec(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << num(v[i]);
    out_ << '\n';
  }
  std::string path() const { return path_.string(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::ofstream out_;
  fs::path path_;
};

json polaron_json(const PolaronParams& p) {
  return {{"delta", p.delta},         {"delta_tilde", p.delta_tilde}, {"theta", p.theta},
          {"delta0", p.delta0},       {"e0", p.e0},                   {"vacuum_energy", p.vacuum_energy()},
          {"converged", p.converged}, {"iterations", p.iterations},   {"residual", p.residual},
          {"used_bisection", p.used_bisection}, {"warnings", p.warnings}};
}

std::string timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Context {
  const ExperimentConfig& cfg;
  const RunRequest& req;
  fs::path dir;
  json results = json::object();
  std::vector<std::string> files;

  void write_json(const std::string& name, const json& j) {
    std::ofstream o(dir / name);
    o << j.dump(2) << '\n';
    if (!o) throw Error(ErrorKind::Resource, "cannot write " + name);
    files.push_back(name);
  }

  Csv csv(const std::string& name) {
    files.push_back(name);
    return Csv(dir / name);
  }
};

Wavepacket packet_from(const PacketConfig& pc, const ModeGrid& grid, const PolaronParams& p) {
  return gaussian_wavepacket(grid, pc.mu.value_or(p.delta_tilde), pc.s, pc.x);
}

void run_polaron(Context& cx) {
  ModeGrid grid = grid_from_config(cx.cfg.model);
  PolaronParams p = solve_polaron(grid, cx.cfg.model.delta, polaron_options(cx.cfg.polaron));
  cx.results["polaron"] = polaron_json(p);
  cx.results["n_modes_retained"] = grid.n_modes;
  cx.write_json("grid.json", grid_record(grid));
  Csv c = cx.csv("polaron.csv");
  c.header({"k", "omega", "g", "f"});
  for (int i = 0; i < grid.n_modes; ++i) c.row(grid.k(i), grid.omegas(i), grid.g(i), p.f(i));
}

void run_scatter1(Context& cx) {
  ModeGrid grid = grid_from_config(cx.cfg.model);
  PolaronParams p = solve_polaron(grid, cx.cfg.model.delta, polaron_options(cx.cfg.polaron));
  SelfEnergyModel s = sigma_from_config(cx.cfg.scatter, p, grid);
  ScatterResult1 r = scatter1(p, grid, s);
  Csv c = cx.csv("scatter1.csv");
  c.header({"omega", "re_s", "im_s", "abs_t2", "abs_r2", "lamb_shift", "gamma"});
  double worst = 0.0;
  for (int k = 0; k < grid.n_modes; ++k) {
    SelfEnergyValue sv{r.sigma(k)};
    c.row(r.omegas(k), r.s(k).real(), r.s(k).imag(), std::norm(r.t(k)), std::norm(r.r(k)), sv.lamb_shift(),
          sv.gamma());
    worst = std::max(worst, std::abs(std::abs(r.s(k)) - 1.0));
  }
  cx.results["polaron"] = polaron_json(p);
  cx.results["max_unitarity_defect"] = worst;
}

void run_scatter2(Context& cx) {
  ModeGrid grid = grid_from_config(cx.cfg.model);
  PolaronParams p = solve_polaron(grid, cx.cfg.model.delta, polaron_options(cx.cfg.polaron));
  SelfEnergyModel s = sigma_from_config(cx.cfg.scatter, p, grid);
  QuadratureSpec q = quadrature_spec(cx.cfg.scatter.quadrature);
  double de = shell_spacing(grid);
  double e = cx.cfg.scatter.e_total.value_or(2.0 * p.delta_tilde);
  // omega_n = (n + 1) dE, so a pair (a, b) sits at (a + b + 2) dE
  long shell = std::lround(e / de) - 2;
  if (shell < 0 || shell > 2L * (grid.n_modes - 1))
    throw Error(ErrorKind::Parameter, "scatter.e_total is outside the two-photon band of the grid");
  int n = grid.n_modes;
  int k1 = int(shell / 2), k2 = int(shell - k1);
  Pi2Matrix pi2 = pi2_matrix(cplx(grid.omegas(k1) + grid.omegas(k2), 0.0), s, q, cx.cfg.scatter.full_table);
  Eigen::Matrix3cd t = t_matrix_2(pi2, p.delta0);
  BoundaryVector vi = boundary_vector(k1, k2, p, grid, s);
  Csv c = cx.csv("scatter2.csv");
  c.header({"p1", "p2", "omega_p1", "omega_p2", "re_m", "im_m", "abs_m2", "re_s", "im_s"});
  int lo = int(std::max<long>(0, shell - (n - 1))), hi = int(std::min<long>(n - 1, shell));
  for (int a = lo; a <= hi; ++a) {
    int b = int(shell - a);
    BoundaryVector vf = boundary_vector(a, b, p, grid, s);
    cplx m = vf.v.transpose() * t * vi.v;
    cplx sd = cplx(0.0, -2.0 * std::numbers::pi / de) * m;
    c.row(a, b, grid.omegas(a), grid.omegas(b), m.real(), m.imag(), std::norm(m), sd.real(), sd.imag());
  }
  json pim = json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) pim.push_back({pi2.m(i, j).real(), pi2.m(i, j).imag()});
  cx.results["polaron"] = polaron_json(p);
  cx.results["e_total"] = vi.E;
  cx.results["incoming"] = {k1, k2};
  cx.results["shell_spacing"] = de;
  cx.results["quadrature"] = {{"error", pi2.error}, {"evals", pi2.evals}, {"converged", pi2.converged},
                              {"pi2", pim}};
}

void run_dynamics(Context& cx) {
  const auto& dc = cx.cfg.dynamics;
  ModeGrid grid = grid_from_config(cx.cfg.model);
  PolaronParams p = solve_polaron(grid, cx.cfg.model.delta, polaron_options(cx.cfg.polaron));
  TwoExcBasis basis = enumerate_basis(grid);
  HamiltonianOperator h(basis, p, grid);
  h.estimate_bounds();
  std::vector<Wavepacket> packets;
  for (const auto& pc : dc.packets) packets.push_back(packet_from(pc, grid, p));
  json precs = json::array();
  for (const auto& wp : packets) precs.push_back(wavepacket_record(wp));
  cx.write_json("packets.json", precs);
  Eigen::VectorXcd st = initial_state(basis, packets);
  PropagationOptions opt{dc.t_final, dc.dt_report, dc.tol, false};
  auto snaps = propagate(st, h, opt);

  Csv c = cx.csv("dynamics.csv");
  c.header({"t", "p_e", "n_excit", "norm"});
  for (const auto& s : snaps) c.row(s.obs.t, s.obs.p_e, s.obs.n_excit, s.obs.norm);
  if (dc.dump_amplitudes) {
    std::vector<std::string> head{"t"};
    for (int k = 0; k < grid.n_modes; ++k) head.push_back(num(grid.omegas(k)));
    Csv a = cx.csv("psi1_abs2.csv");
    a.header(head);
    for (const auto& s : snaps) {
      std::vector<double> row{s.obs.t};
      for (int k = 0; k < grid.n_modes; ++k) row.push_back(std::norm(s.obs.psi1(k)));
      a.row_vec(row);
    }
    if (packets.size() == 2) {
      Csv m = cx.csv("marginal.csv");
      m.header(head);
      for (const auto& s : snaps) {
        std::vector<double> row{s.obs.t};
        for (int k = 0; k < grid.n_modes; ++k) row.push_back(s.obs.marginal(k));
        m.row_vec(row);
      }
    }
  }
  double drift = 0.0;
  for (const auto& s : snaps) drift = std::max(drift, std::abs(s.obs.n_excit - snaps.front().obs.n_excit));
  cx.results["polaron"] = polaron_json(p);
  cx.results["dimension"] = basis.dimension();
  cx.results["spectral_bounds"] = {h.e_min(), h.e_max()};
  cx.results["max_n_excit_drift"] = drift;
  cx.results["records"] = snaps.size();
}

void run_chainmap(Context& cx) {
  ModeGrid grid = grid_from_config(cx.cfg.model);
  PolaronParams p = solve_polaron(grid, cx.cfg.model.delta, polaron_options(cx.cfg.polaron));
  ChainCoefficients ch = chain_coefficients(p, grid);
  Csv c = cx.csv("chain.csv");
  c.header({"r", "alpha_r", "beta_r"});
  for (Eigen::Index r = 0; r < ch.alphas.size(); ++r) {
    if (r < ch.betas.size()) c.row(int(r), ch.alphas(r), num(ch.betas(r)));
    else c.row(int(r), ch.alphas(r), std::string());
  }
  json head = {{"theta", ch.theta}, {"beta0", ch.beta0}, {"delta_tilde", ch.delta_tilde},
               {"length", ch.alphas.size()}};
  cx.write_json("chain_header.json", head);
  cx.results["chain"] = head;
}

std::vector<double> time_axis(double t_final, double dt) {
  std::vector<double> ts{0.0};
  long steps = long(std::ceil(t_final / dt - 1e-9));
  for (long i = 1; i <= steps; ++i) ts.push_back(std::min(t_final, double(i) * dt));
  return ts;
}

void run_oracle(Context& cx) {
  const auto& oc = cx.cfg.oracle;
  ModeGrid grid = grid_from_config(cx.cfg.model);
  PolaronParams p = solve_polaron(grid, cx.cfg.model.delta, polaron_options(cx.cfg.polaron));
  FockTruncation trunc{grid.n_modes, oc.max_photons, oc.budget};
  const std::string& mode = cx.req.mode;
  cx.results["polaron"] = polaron_json(p);

  if (mode == "ground") {
    Csv c = cx.csv("oracle_ground.csv");
    c.header({"max_photons", "dimension", "energy", "top_level_population"});
    double last = 0.0;
    for (int nm = 1; nm <= oc.max_photons; ++nm) {
      FockTruncation t{grid.n_modes, nm, oc.budget};
      GroundResult g = exact_ground(grid, cx.cfg.model.delta, t);
      c.row(nm, t.dimension(), g.energy, g.top_level_population);
      last = g.energy;
    }
    cx.results["exact_ground_energy"] = last;
    cx.results["polaron_vacuum_energy"] = p.vacuum_energy();
    cx.results["variational_gap"] = p.vacuum_energy() - last;
    return;
  }
  if (mode != "evolve" && mode != "compare-dynamics")
    throw Error(ErrorKind::Config, "oracle mode must be ground, evolve or compare-dynamics");

  Wavepacket wp = packet_from(cx.cfg.dynamics.packets.front(), grid, p);
  FockSpace space(trunc);
  Eigen::VectorXcd psi = oracle_polaron_state(space, false, &wp.phi);
  auto ts = time_axis(oc.t_final, oc.dt_report);
  EvolveResult ev = exact_evolve(grid, p, trunc, psi, ts);
  double n0 = ev.records.front().n_excit, drift = 0.0;
  for (const auto& r : ev.records) drift = std::max(drift, std::abs(r.n_excit - n0) / n0);
  cx.results["max_relative_n_excit_drift"] = drift;
  cx.results["max_top_level_population"] = ev.max_top_level_population;
  cx.results["leakage_warning"] = ev.leakage_warning;

  if (mode == "evolve") {
    Csv c = cx.csv("oracle_evolve.csv");
    c.header({"t", "p_e", "n_excit"});
    for (const auto& r : ev.records) c.row(r.t, r.p_e, r.n_excit);
    return;
  }
  TwoExcBasis basis = enumerate_basis(grid);
  HamiltonianOperator h(basis, p, grid);
  h.estimate_bounds();
  Eigen::VectorXcd st = initial_state(basis, {wp});
  PropagationOptions opt{oc.t_final, oc.dt_report, cx.cfg.dynamics.tol, false};
  auto snaps = propagate(st, h, opt);
  Csv c = cx.csv("compare.csv");
  c.header({"t", "p_e_exact", "p_e_rwa", "n_excit_exact", "n_excit_rwa"});
  double sup = 0.0;
  for (std::size_t i = 0; i < ev.records.size() && i < snaps.size(); ++i) {
    c.row(ev.records[i].t, ev.records[i].p_e, snaps[i].obs.p_e, ev.records[i].n_excit, snaps[i].obs.n_excit);
    sup = std::max(sup, std::abs(ev.records[i].p_e - snaps[i].obs.p_e));
  }
  cx.results["sup_p_e_difference"] = sup;
}

void run_sweep(Context& cx) {
  const auto& alphas = cx.cfg.sweep.alphas;
  std::vector<PolaronParams> out(alphas.size());
  std::vector<std::exception_ptr> errs(alphas.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < alphas.size(); i = next++) {
      try {
        ModelConfig m = cx.cfg.model;
        m.alpha = alphas[i];
        ModeGrid grid = grid_from_config(m);
        out[i] = solve_polaron(grid, m.delta, polaron_options(cx.cfg.polaron));
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::max(1, cx.req.jobs); ++j) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  Csv c = cx.csv("sweep.csv");
  c.header({"alpha", "delta_tilde", "theta", "e0", "iterations", "residual"});
  json points = json::array();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    c.row(alphas[i], out[i].delta_tilde, out[i].theta, out[i].e0, out[i].iterations, out[i].residual);
    char name[32];
    std::snprintf(name, sizeof name, "sweep_%02zu", i);
    fs::create_directories(cx.dir / name);
    ExperimentConfig sub = cx.cfg;
    sub.model.alpha = alphas[i];
    json man = {{"tool", "usc"},
                {"version", kVersion},
                {"subcommand", "polaron"},
                {"config", emit_config(sub)},
                {"status", "ok"},
                {"exit_code", 0},
                {"results", {{"polaron", polaron_json(out[i])}}},
                {"generated_at", timestamp()}};
    std::ofstream(cx.dir / name / "manifest.json") << man.dump(2) << '\n';
    cx.files.push_back(std::string(name) + "/manifest.json");
    points.push_back({{"alpha", alphas[i]}, {"delta_tilde", out[i].delta_tilde}});
  }
  cx.results["points"] = points;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunRequest& req) {
  RunOutcome outcome;
  fs::path dir = req.out_dir.empty() ? fs::path(cfg.output.directory) : fs::path(req.out_dir);
  Context cx{cfg, req, dir, json::object(), {}};
  json manifest = {{"tool", "usc"},           {"version", kVersion},
                   {"subcommand", req.subcommand}, {"mode", req.mode},
                   {"jobs", req.jobs},        {"config", emit_config(cfg)}};
  try {
    fs::create_directories(dir);
    const std::string& s = req.subcommand;
    if (s == "polaron") run_polaron(cx);
    else if (s == "scatter1") run_scatter1(cx);
    else if (s == "scatter2") run_scatter2(cx);
    else if (s == "dynamics") run_dynamics(cx);
    else if (s == "chainmap") run_chainmap(cx);
    else if (s == "oracle") run_oracle(cx);
    else if (s == "sweep") run_sweep(cx);
    else throw Error(ErrorKind::Config, "unknown subcommand " + s);
    manifest["status"] = "ok";
  } catch (const Error& e) {
    outcome.exit_code = exit_code(e.kind());
    outcome.error = e.what();
    manifest["status"] = "error";
    manifest["error_kind"] = kind_name(e.kind());
    manifest["error"] = e.what();
    manifest["error_value"] = e.value();
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.error = e.what();
    manifest["status"] = "error";
    manifest["error_kind"] = "internal";
    manifest["error"] = e.what();
  }
  manifest["exit_code"] = outcome.exit_code;
  manifest["results"] = cx.results;
  manifest["files"] = cx.files;
  manifest["generated_at"] = timestamp();
  try {
    fs::create_directories(dir);
    std::ofstream m(dir / "manifest.json");
    m << manifest.dump(2) << '\n';
    if (!m) throw std::runtime_error("write failed");
  } catch (const std::exception& e) {
    if (outcome.exit_code == 0) {
      outcome.exit_code = exit_code(ErrorKind::Resource);
      outcome.error = std::string("cannot write manifest: ") + e.what();
    }
  }
  outcome.files = cx.files;
  outcome.files.push_back("manifest.json");
  return outcome;
}

}  // namespace usc
