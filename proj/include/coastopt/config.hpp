#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coastopt/optimize.hpp"

namespace coastopt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absorption coefficient given directly or through Berkhoff's formula.
struct AlphaSpec {
  bool berkhoff = false;
  Complex value = 0.0;
  double K = 1.0;
  double beta = 0.0;
  double gamma = 0.0;

  [[nodiscard]] Complex resolve() const;
  bool operator==(const AlphaSpec&) const = default;
};

struct WaveConfig {
  double k = 1.0;
  double amplitude = 1.0;
  double phi = 0.0;  // radians
  AlphaSpec alpha_coast;
  AlphaSpec alpha_obstacle;
  double weight = 1.0;

  [[nodiscard]] WaveSpec resolve() const;
  bool operator==(const WaveConfig&) const = default;
};

struct RunConfig {
  std::string mesh;
  std::map<std::string, std::string> physical_names;  // file name -> G1..G5, OMEGA, D
  int order = 1;
  Regime regime = Regime::scatterer;
  double phi1 = 1.0;
  double phi2 = 1.0;
  std::vector<WaveConfig> waves;
  double target = 0.0;
  double xi = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double mu_min = 10.0;
  double mu_max = 100.0;
  double rho = 0.04;
  double shrink = 0.5;
  int max_trials = 25;
  double eps_stop = 1e-6;
  double rel_eps_stop = 0.0;
  int max_iterations = 500;
  SupportMode support = SupportMode::near_obstacle;
  AdjointLateral adjoint_lateral = AdjointLateral::periodic;
  TopologyOptions topology;
  std::string output_dir = "coastopt_out";
  int snapshot_stride = 10;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig& o) const;

  [[nodiscard]] PhysicalNameTable name_table() const;
  [[nodiscard]] OptimizationConfig optimization() const;
  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses the JSON configuration text. Relative mesh paths are resolved
/// against `base_dir` when it is non-empty.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace coastopt
