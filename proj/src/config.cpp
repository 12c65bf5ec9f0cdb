#include "coastopt/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <type_traits>

#include "json.hpp"

namespace coastopt {

using nlohmann::json;

Complex AlphaSpec::resolve() const { return berkhoff ? berkhoff_alpha(K, beta, gamma) : value; }

WaveSpec WaveConfig::resolve() const {
  WaveSpec w;
  w.k = k;
  w.amplitude = amplitude;
  w.phi = phi;
  w.alpha_coast = alpha_coast.resolve();
  w.alpha_obstacle = alpha_obstacle.resolve();
  w.weight = weight;
  return w;
}

bool RunConfig::operator==(const RunConfig& o) const {
  auto topo_eq = [](const TopologyOptions& a, const TopologyOptions& b) {
    return a.quantile == b.quantile && a.eps == b.eps && a.min_points == b.min_points &&
           a.pad == b.pad && a.margin == b.margin;
  };
  return mesh == o.mesh && physical_names == o.physical_names && order == o.order &&
         regime == o.regime && phi1 == o.phi1 && phi2 == o.phi2 && waves == o.waves &&
         target == o.target && xi == o.xi && nu1 == o.nu1 && nu2 == o.nu2 && mu_min == o.mu_min &&
         mu_max == o.mu_max && rho == o.rho && shrink == o.shrink && max_trials == o.max_trials &&
         eps_stop == o.eps_stop && rel_eps_stop == o.rel_eps_stop &&
         max_iterations == o.max_iterations && support == o.support &&
         adjoint_lateral == o.adjoint_lateral && topo_eq(topology, o.topology) &&
         output_dir == o.output_dir && snapshot_stride == o.snapshot_stride && seed == o.seed;
}

PhysicalNameTable RunConfig::name_table() const {
  PhysicalNameTable table = default_physical_names();
  const auto defaults = default_physical_names();
  for (const auto& [name, target] : physical_names) {
    auto it = defaults.find(target);
    if (it == defaults.end()) throw ConfigError("physical_names: unknown target '" + target + "'");
    table[name] = it->second;
  }
  return table;
}

OptimizationConfig RunConfig::optimization() const {
  OptimizationConfig c;
  c.state.regime = regime;
  c.state.transmission = {phi1, phi2};
  c.state.order = order;
  for (const auto& w : waves) c.waves.push_back(w.resolve());
  c.objective.target = target;
  c.objective.xi = xi;
  c.objective.nu1 = nu1;
  c.objective.nu2 = nu2;
  c.adjoint.lateral = adjoint_lateral;
  c.support = support;
  c.mu_min = mu_min;
  c.mu_max = mu_max;
  c.line_search = {rho, shrink, max_trials};
  c.eps_stop = eps_stop;
  c.rel_eps_stop = rel_eps_stop;
  c.max_iterations = max_iterations;
  return c;
}

void RunConfig::validate() const {
  if (mesh.empty()) throw ConfigError("mesh: path is required");
  if (order != 1 && order != 2) throw ConfigError("order: must be 1 or 2");
  if (waves.empty()) throw ConfigError("waves: at least one wave is required");
  for (std::size_t i = 0; i < waves.size(); ++i) {
    try {
      waves[i].resolve().validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("waves[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (regime == Regime::transmissive && (!(phi1 > 0.0) || !(phi2 > 0.0))) {
    throw ConfigError("transmission: phi1 and phi2 must be positive");
  }
  if (xi < 0.0 || nu1 < 0.0 || nu2 < 0.0) throw ConfigError("objective: weights must be non-negative");
  if (!(mu_min > 0.0) || !(mu_max >= mu_min)) throw ConfigError("elasticity: need 0 < mu_min <= mu_max");
  if (!(rho > 0.0)) throw ConfigError("line_search.rho: must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("line_search.shrink: must lie in (0, 1)");
  if (max_trials < 1) throw ConfigError("line_search.max_trials: must be at least 1");
  if (max_iterations < 0) throw ConfigError("stopping.max_iterations: must be non-negative");
  if (!(topology.quantile > 0.0 && topology.quantile < 1.0)) {
    throw ConfigError("topology.quantile: must lie in (0, 1)");
  }
  if (topology.min_points < 1) throw ConfigError("topology.min_points: must be at least 1");
  if (snapshot_stride < 0) throw ConfigError("output.snapshot_stride: must be non-negative");
  (void)name_table();
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  if constexpr (std::is_integral_v<T>) {
    if (!j.at(key).is_number_integer()) throw ConfigError(where + key + ": expected an integer");
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + key + ": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + where + (where.empty() ? "" : ".") + key + "'");
  }
}

AlphaSpec parse_alpha(const json& j, const std::string& where) {
  AlphaSpec a;
  if (j.is_number()) {
    a.value = Complex(0.0, j.get<double>());
    return a;
  }
  check_keys(j, {"re", "im", "K", "beta", "gamma"}, where);
  if (j.contains("K")) {
    a.berkhoff = true;
    read(j, "K", a.K, where + ".");
    read(j, "beta", a.beta, where + ".");
    read(j, "gamma", a.gamma, where + ".");
    if (j.contains("re") || j.contains("im")) {
      throw ConfigError(where + ": give either re/im or K/beta/gamma");
    }
    return a;
  }
  double re = 0.0;
  double im = 0.0;
  read(j, "re", re, where + ".");
  read(j, "im", im, where + ".");
  a.value = Complex(re, im);
  return a;
}

json alpha_json(const AlphaSpec& a) {
  if (a.berkhoff) return {{"K", a.K}, {"beta", a.beta}, {"gamma", a.gamma}};
  return {{"re", a.value.real()}, {"im", a.value.imag()}};
}

std::string read_string(const json& j, const char* key) {
  if (!j.at(key).is_string()) throw ConfigError(std::string(key) + ": expected a string");
  return j.at(key).get<std::string>();
}

std::string support_name(SupportMode m) { return m == SupportMode::near_obstacle ? "near_obstacle" : "all_free"; }
std::string lateral_name(AdjointLateral l) { return l == AdjointLateral::periodic ? "periodic" : "dirichlet"; }

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"mesh", "physical_names", "order", "regime", "transmission", "waves", "objective",
                 "elasticity", "line_search", "stopping", "support", "adjoint_lateral", "topology",
                 "output", "seed"},
             "");
  RunConfig c;
  read(j, "mesh", c.mesh, "");
  if (!c.mesh.empty() && !base_dir.empty() && std::filesystem::path(c.mesh).is_relative()) {
    c.mesh = (std::filesystem::path(base_dir) / c.mesh).lexically_normal().string();
  }
  read(j, "physical_names", c.physical_names, "");
  read(j, "order", c.order, "");
  read(j, "seed", c.seed, "");
  if (j.contains("regime")) {
    const auto r = read_string(j, "regime");
    if (r == "scatterer") {
      c.regime = Regime::scatterer;
    } else if (r == "transmissive") {
      c.regime = Regime::transmissive;
    } else {
      throw ConfigError("regime: expected 'scatterer' or 'transmissive', got '" + r + "'");
    }
  }
  if (j.contains("transmission")) {
    const auto& t = j.at("transmission");
    check_keys(t, {"phi1", "phi2"}, "transmission");
    read(t, "phi1", c.phi1, "transmission.");
    read(t, "phi2", c.phi2, "transmission.");
  }
  if (j.contains("waves")) {
    if (!j.at("waves").is_array()) throw ConfigError("waves: expected an array");
    std::size_t i = 0;
    for (const auto& w : j.at("waves")) {
      const std::string where = "waves[" + std::to_string(i++) + "]";
      check_keys(w, {"k", "amplitude", "phi", "phi_pi", "alpha", "alpha_coast", "alpha_obstacle", "weight"},
                 where);
      WaveConfig wc;
      read(w, "k", wc.k, where + ".");
      read(w, "amplitude", wc.amplitude, where + ".");
      read(w, "weight", wc.weight, where + ".");
      if (w.contains("phi") && w.contains("phi_pi")) throw ConfigError(where + ": give phi or phi_pi");
      read(w, "phi", wc.phi, where + ".");
      if (w.contains("phi_pi")) {
        double p = 0.0;
        read(w, "phi_pi", p, where + ".");
        wc.phi = p * std::numbers::pi;
      }
      if (w.contains("alpha")) wc.alpha_coast = wc.alpha_obstacle = parse_alpha(w.at("alpha"), where + ".alpha");
      if (w.contains("alpha_coast")) wc.alpha_coast = parse_alpha(w.at("alpha_coast"), where + ".alpha_coast");
      if (w.contains("alpha_obstacle")) {
        wc.alpha_obstacle = parse_alpha(w.at("alpha_obstacle"), where + ".alpha_obstacle");
      }
      c.waves.push_back(wc);
    }
  }
  if (j.contains("objective")) {
    const auto& o = j.at("objective");
    check_keys(o, {"target", "xi", "nu1", "nu2"}, "objective");
    read(o, "target", c.target, "objective.");
    read(o, "xi", c.xi, "objective.");
    read(o, "nu1", c.nu1, "objective.");
    read(o, "nu2", c.nu2, "objective.");
  }
  if (j.contains("elasticity")) {
    const auto& e = j.at("elasticity");
    check_keys(e, {"mu_min", "mu_max"}, "elasticity");
    read(e, "mu_min", c.mu_min, "elasticity.");
    read(e, "mu_max", c.mu_max, "elasticity.");
  }
  if (j.contains("line_search")) {
    const auto& l = j.at("line_search");
    check_keys(l, {"rho", "shrink", "max_trials"}, "line_search");
    read(l, "rho", c.rho, "line_search.");
    read(l, "shrink", c.shrink, "line_search.");
    read(l, "max_trials", c.max_trials, "line_search.");
  }
  if (j.contains("stopping")) {
    const auto& s = j.at("stopping");
    check_keys(s, {"eps", "rel_eps", "max_iterations"}, "stopping");
    read(s, "eps", c.eps_stop, "stopping.");
    read(s, "rel_eps", c.rel_eps_stop, "stopping.");
    read(s, "max_iterations", c.max_iterations, "stopping.");
  }
  if (j.contains("support")) {
    const auto s = read_string(j, "support");
    if (s == "near_obstacle") {
      c.support = SupportMode::near_obstacle;
    } else if (s == "all_free") {
      c.support = SupportMode::all_free;
    } else {
      throw ConfigError("support: expected 'near_obstacle' or 'all_free'");
    }
  }
  if (j.contains("adjoint_lateral")) {
    const auto s = read_string(j, "adjoint_lateral");
    if (s == "periodic") {
      c.adjoint_lateral = AdjointLateral::periodic;
    } else if (s == "dirichlet") {
      c.adjoint_lateral = AdjointLateral::dirichlet;
    } else {
      throw ConfigError("adjoint_lateral: expected 'periodic' or 'dirichlet'");
    }
  }
  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    check_keys(t, {"quantile", "eps", "min_points", "pad", "margin"}, "topology");
    read(t, "quantile", c.topology.quantile, "topology.");
    read(t, "eps", c.topology.eps, "topology.");
    read(t, "min_points", c.topology.min_points, "topology.");
    read(t, "pad", c.topology.pad, "topology.");
    read(t, "margin", c.topology.margin, "topology.");
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    check_keys(o, {"directory", "snapshot_stride"}, "output");
    read(o, "directory", c.output_dir, "output.");
    read(o, "snapshot_stride", c.snapshot_stride, "output.");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["mesh"] = c.mesh;
  j["physical_names"] = c.physical_names;
  j["order"] = c.order;
  j["regime"] = to_string(c.regime);
  j["transmission"] = {{"phi1", c.phi1}, {"phi2", c.phi2}};
  j["waves"] = json::array();
  for (const auto& w : c.waves) {
    j["waves"].push_back({{"k", w.k},
                          {"amplitude", w.amplitude},
                          {"phi", w.phi},
                          {"alpha_coast", alpha_json(w.alpha_coast)},
                          {"alpha_obstacle", alpha_json(w.alpha_obstacle)},
                          {"weight", w.weight}});
  }
  j["objective"] = {{"target", c.target}, {"xi", c.xi}, {"nu1", c.nu1}, {"nu2", c.nu2}};
  j["elasticity"] = {{"mu_min", c.mu_min}, {"mu_max", c.mu_max}};
  j["line_search"] = {{"rho", c.rho}, {"shrink", c.shrink}, {"max_trials", c.max_trials}};
  j["stopping"] = {{"eps", c.eps_stop}, {"rel_eps", c.rel_eps_stop}, {"max_iterations", c.max_iterations}};
  j["support"] = support_name(c.support);
  j["adjoint_lateral"] = lateral_name(c.adjoint_lateral);
  j["topology"] = {{"quantile", c.topology.quantile},
                   {"eps", c.topology.eps},
                   {"min_points", c.topology.min_points},
                   {"pad", c.topology.pad},
                   {"margin", c.topology.margin}};
  j["output"] = {{"directory", c.output_dir}, {"snapshot_stride", c.snapshot_stride}};
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

}  // namespace coastopt
