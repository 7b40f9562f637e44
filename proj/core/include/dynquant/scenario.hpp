#pragma once

#include "dynquant/evolve.hpp"
#include "dynquant/lindblad.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dynquant {

/// Bad configuration input (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string name;  // harmonic | damped | lorenz | rossler | leipnik_newton |
                     // fokker_planck | quantum_lorenz | custom
  double hbar = 1.0;
  int dim = 0;  // per-mode truncation; 0 = scenario default
  double scale_mass = 0.0, scale_omega = 0.0;  // 0 = scenario default

  // system parameters; which block applies depends on `name`
  double mass = 1.0, omega = 1.0, friction = 0.1;     // harmonic / damped
  FokkerPlanckCoeffs fp;                              // fokker_planck
  double sigma = 10.0, r = 28.0, b = 8.0 / 3.0;       // quantum_lorenz
  std::optional<DynOpSymbol> custom_op;               // custom

  std::vector<double> q0, p0;  // coherent initial state; empty = scenario default
  EvolutionSpec evolution;
  bool evolution_given = false;

  std::string out = "out";
  std::uint64_t seed = 0xD15517A7ULL;
  bool classical_only = false;
  bool allow_large = false;
  bool verify = false;
};

struct CliOverrides {
  std::optional<std::string> scenario;
  std::optional<double> hbar;
  std::optional<int> dim;
  std::optional<double> dt;
  std::optional<long> steps;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool classical_only = false;
  bool allow_large = false;
  bool verify = false;
};

/// Parse a config JSON text (may be empty) and apply flag overrides (flags
/// win). A run manifest is accepted too: its "config" object is the config.
/// Unknown keys and missing required fields raise ConfigError naming the key.
ScenarioConfig load_scenario_config(const std::string& json_text, const CliOverrides& overrides);

/// Resolved config as canonical JSON (every field explicit); re-running from
/// this text reproduces byte-identical trajectory CSV.
std::string scenario_config_json(const ScenarioConfig& cfg);

/// Runs the scenario: writes <out>/trajectory.csv, <out>/manifest.json and,
/// with cfg.verify, <out>/verify_report.json. Returns 0, or 5 when a
/// verification suite fails. Throws ConfigError / DivergenceError /
/// InfeasibleError for exit codes 2 / 3 / 4.
int run_scenario(const ScenarioConfig& cfg);

}  // namespace dynquant
