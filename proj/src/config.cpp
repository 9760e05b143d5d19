#include "usc/config.hpp"

#include <set>
#include <type_traits>
#include <variant>

#include "usc/errors.hpp"

namespace usc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::Config, key + ": " + what);
}

void only(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(where, "must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(where + "." + it.key(), "unknown key");
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  std::string name = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(name, "must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(name, "must be an integer");
    out = v.get<T>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) fail(name, "must be a number");
    out = v.get<T>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(name, "must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    if (v.is_null()) out.reset();
    else if (v.is_number()) out = v.get<double>();
    else fail(name, "must be a number or null");
  }
}

void check(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) fail(key, constraint);
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  only(doc, "config", {"model", "polaron", "scatter", "dynamics", "oracle", "sweep", "output"});
  if (!doc.contains("model")) fail("model", "required section missing");
  ExperimentConfig c;

  const json& m = doc.at("model");
  only(m, "model", {"n_modes", "length", "dispersion", "c", "cutoff", "omega_c", "alpha", "delta"});
  read(m, "model", "n_modes", c.model.n_modes);
  read(m, "model", "length", c.model.length);
  read(m, "model", "dispersion", c.model.dispersion);
  read(m, "model", "c", c.model.c);
  read(m, "model", "cutoff", c.model.cutoff);
  read(m, "model", "omega_c", c.model.omega_c);
  read(m, "model", "alpha", c.model.alpha);
  read(m, "model", "delta", c.model.delta);
  check(c.model.n_modes >= 1, "model.n_modes", "must be >= 1");
  check(c.model.length > 0.0, "model.length", "must be positive");
  check(c.model.dispersion == "linear" || c.model.dispersion == "sine", "model.dispersion",
        "must be linear or sine");
  check(c.model.c > 0.0, "model.c", "must be positive");
  check(c.model.cutoff == "hard" || c.model.cutoff == "exponential", "model.cutoff", "must be hard or exponential");
  check(c.model.omega_c > 0.0, "model.omega_c", "must be positive");
  check(c.model.alpha >= 0.0 && c.model.alpha <= kAlphaMax, "model.alpha", "alpha must be in [0, 0.49]");
  check(c.model.delta > 0.0, "model.delta", "must be positive");

  if (doc.contains("polaron")) {
    const json& p = doc.at("polaron");
    only(p, "polaron", {"tol", "max_iter", "damping"});
    read(p, "polaron", "tol", c.polaron.tol);
    read(p, "polaron", "max_iter", c.polaron.max_iter);
    read(p, "polaron", "damping", c.polaron.damping);
  }
  check(c.polaron.tol > 0.0, "polaron.tol", "must be positive");
  check(c.polaron.max_iter >= 1, "polaron.max_iter", "must be >= 1");
  check(c.polaron.damping > 0.0 && c.polaron.damping <= 1.0, "polaron.damping", "must be in (0, 1]");

  if (doc.contains("scatter")) {
    const json& s = doc.at("scatter");
    only(s, "scatter", {"sigma_source", "eta_factor", "e_total", "full_table", "quadrature"});
    read(s, "scatter", "sigma_source", c.scatter.sigma_source);
    read(s, "scatter", "eta_factor", c.scatter.eta_factor);
    read(s, "scatter", "e_total", c.scatter.e_total);
    read(s, "scatter", "full_table", c.scatter.full_table);
    if (s.contains("quadrature")) {
      const json& q = s.at("quadrature");
      only(q, "scatter.quadrature", {"abs_tol", "rel_tol", "max_evals", "eta"});
      read(q, "scatter.quadrature", "abs_tol", c.scatter.quadrature.abs_tol);
      read(q, "scatter.quadrature", "rel_tol", c.scatter.quadrature.rel_tol);
      read(q, "scatter.quadrature", "max_evals", c.scatter.quadrature.max_evals);
      read(q, "scatter.quadrature", "eta", c.scatter.quadrature.eta);
    }
  }
  check(c.scatter.sigma_source == "grid" || c.scatter.sigma_source == "closed" ||
            c.scatter.sigma_source == "discrete",
        "scatter.sigma_source", "must be grid, closed or discrete");
  check(c.scatter.eta_factor > 0.0, "scatter.eta_factor", "must be positive");
  check(c.scatter.quadrature.abs_tol > 0.0, "scatter.quadrature.abs_tol", "must be positive");
  check(c.scatter.quadrature.rel_tol > 0.0, "scatter.quadrature.rel_tol", "must be positive");
  check(c.scatter.quadrature.max_evals >= 1000, "scatter.quadrature.max_evals", "must be >= 1000");
  check(c.scatter.quadrature.eta >= 0.0, "scatter.quadrature.eta", "must be >= 0");

  if (doc.contains("dynamics")) {
    const json& d = doc.at("dynamics");
    only(d, "dynamics", {"packets", "t_final", "dt_report", "tol", "dump_amplitudes"});
    if (d.contains("packets")) {
      const json& ps = d.at("packets");
      if (!ps.is_array()) fail("dynamics.packets", "must be an array");
      c.dynamics.packets.clear();
      for (std::size_t i = 0; i < ps.size(); ++i) {
        std::string where = "dynamics.packets[" + std::to_string(i) + "]";
        only(ps[i], where, {"mu", "s", "x"});
        PacketConfig pc;
        read(ps[i], where, "mu", pc.mu);
        read(ps[i], where, "s", pc.s);
        read(ps[i], where, "x", pc.x);
        check(pc.s > 0.0, where + ".s", "must be positive");
        c.dynamics.packets.push_back(pc);
      }
    }
    read(d, "dynamics", "t_final", c.dynamics.t_final);
    read(d, "dynamics", "dt_report", c.dynamics.dt_report);
    read(d, "dynamics", "tol", c.dynamics.tol);
    read(d, "dynamics", "dump_amplitudes", c.dynamics.dump_amplitudes);
  }
  check(!c.dynamics.packets.empty() && c.dynamics.packets.size() <= 2, "dynamics.packets",
        "one or two packets required");
  check(c.dynamics.t_final >= 0.0, "dynamics.t_final", "must be >= 0");
  check(c.dynamics.dt_report > 0.0, "dynamics.dt_report", "must be positive");
  check(c.dynamics.tol > 0.0, "dynamics.tol", "must be positive");

  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    only(o, "oracle", {"max_photons", "budget", "t_final", "dt_report"});
    read(o, "oracle", "max_photons", c.oracle.max_photons);
    read(o, "oracle", "budget", c.oracle.budget);
    read(o, "oracle", "t_final", c.oracle.t_final);
    read(o, "oracle", "dt_report", c.oracle.dt_report);
  }
  check(c.oracle.max_photons >= 1, "oracle.max_photons", "must be >= 1");
  check(c.oracle.budget >= 2, "oracle.budget", "must be >= 2");
  check(c.oracle.t_final >= 0.0, "oracle.t_final", "must be >= 0");
  check(c.oracle.dt_report > 0.0, "oracle.dt_report", "must be positive");

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    only(s, "sweep", {"alphas"});
    if (s.contains("alphas")) {
      if (!s.at("alphas").is_array()) fail("sweep.alphas", "must be an array");
      c.sweep.alphas.clear();
      for (const auto& a : s.at("alphas")) {
        if (!a.is_number()) fail("sweep.alphas", "entries must be numbers");
        double v = a.get<double>();
        check(v >= 0.0 && v <= kAlphaMax, "sweep.alphas", "alpha must be in [0, 0.49]");
        c.sweep.alphas.push_back(v);
      }
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only(o, "output", {"directory"});
    read(o, "output", "directory", c.output.directory);
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config: not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

json emit_config(const ExperimentConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json packets = json::array();
  for (const auto& p : c.dynamics.packets) packets.push_back({{"mu", opt(p.mu)}, {"s", p.s}, {"x", p.x}});
  return {
      {"model",
       {{"n_modes", c.model.n_modes},
        {"length", c.model.length},
        {"dispersion", c.model.dispersion},
        {"c", c.model.c},
        {"cutoff", c.model.cutoff},
        {"omega_c", c.model.omega_c},
        {"alpha", c.model.alpha},
        {"delta", c.model.delta}}},
      {"polaron", {{"tol", c.polaron.tol}, {"max_iter", c.polaron.max_iter}, {"damping", c.polaron.damping}}},
      {"scatter",
       {{"sigma_source", c.scatter.sigma_source},
        {"eta_factor", c.scatter.eta_factor},
        {"e_total", opt(c.scatter.e_total)},
        {"full_table", c.scatter.full_table},
        {"quadrature",
         {{"abs_tol", c.scatter.quadrature.abs_tol},
          {"rel_tol", c.scatter.quadrature.rel_tol},
          {"max_evals", c.scatter.quadrature.max_evals},
          {"eta", c.scatter.quadrature.eta}}}}},
      {"dynamics",
       {{"packets", packets},
        {"t_final", c.dynamics.t_final},
        {"dt_report", c.dynamics.dt_report},
        {"tol", c.dynamics.tol},
        {"dump_amplitudes", c.dynamics.dump_amplitudes}}},
      {"oracle",
       {{"max_photons", c.oracle.max_photons},
        {"budget", c.oracle.budget},
        {"t_final", c.oracle.t_final},
        {"dt_report", c.oracle.dt_report}}},
      {"sweep", {{"alphas", c.sweep.alphas}}},
      {"output", {{"directory", c.output.directory}}},
  };
}

ModeGrid grid_from_config(const ModelConfig& m) {
  Dispersion d = m.dispersion == "sine" ? Dispersion(Sine{m.c}) : Dispersion(Linear{m.c});
  Cutoff cut = m.cutoff == "exponential" ? Cutoff(ExponentialCutoff{m.omega_c}) : Cutoff(HardCutoff{m.omega_c});
  return build_mode_grid(m.n_modes, m.length, d, cut, m.alpha);
}

PolaronOptions polaron_options(const PolaronConfig& p) {
  PolaronOptions o;
  o.tol = p.tol;
  o.max_iter = p.max_iter;
  o.damping = p.damping;
  return o;
}

QuadratureSpec quadrature_spec(const QuadratureConfig& q) {
  return {q.abs_tol, q.rel_tol, q.max_evals, q.eta};
}

nlohmann::json grid_record(const ModeGrid& grid) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json disp = std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        return nlohmann::json{{"kind", std::is_same_v<T, Sine> ? "sine" : "linear"}, {"c", d.c}};
      },
      grid.dispersion);
  nlohmann::json cut = std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        return nlohmann::json{{"kind", std::is_same_v<T, HardCutoff> ? "hard" : "exponential"},
                              {"omega_c", c.omega_c}};
      },
      grid.cutoff);
  return {{"n_modes", grid.n_modes}, {"length", grid.length},   {"dispersion", disp},
          {"cutoff", cut},           {"alpha", grid.alpha},     {"dk", grid.dk},
          {"k", vec(grid.k)},        {"omegas", vec(grid.omegas)}, {"g", vec(grid.g)},
          {"group_velocity", vec(grid.group_velocity)}};
}

nlohmann::json wavepacket_record(const Wavepacket& wp) {
  nlohmann::json phi = nlohmann::json::array();
  for (Eigen::Index i = 0; i < wp.phi.size(); ++i) phi.push_back({wp.phi(i).real(), wp.phi(i).imag()});
  return {{"mu", wp.mu}, {"s", wp.s}, {"x", wp.x}, {"phi", phi}};
}

SelfEnergyModel sigma_from_config(const ScatterConfig& s, const PolaronParams& params, const ModeGrid& grid) {
  if (s.sigma_source == "closed") return SelfEnergyModel::closed(grid.alpha, params.delta_tilde);
  if (s.sigma_source == "discrete") {
    double sp = 0.0;
    for (int i = 0; i < grid.n_modes; ++i) sp = std::max(sp, grid.level_spacing(i));
    return SelfEnergyModel::discrete(params, grid, s.eta_factor * sp);
  }
  return SelfEnergyModel::grid(params, grid);
}

}  // namespace usc
