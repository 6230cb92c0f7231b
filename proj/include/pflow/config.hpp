#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pflow/fluid_model.hpp"
#include "pflow/initializer.hpp"
#include "pflow/integrator.hpp"

namespace pflow {

struct ModelConfig {
  /// isentropic_gas, ideal_gas_entropy, saint_venant or power_law.
  std::string kind = "saint_venant";
  PresetParams preset;
  PowerLaws power{1.0, 2.0, 1.0, 1.0};
  std::optional<double> quad_rel_tol;
  std::optional<double> quad_abs_tol;
};

struct DensityConfig {
  std::string kind = "constant";  // constant | cosine | table
  std::optional<double> value;    // constant: defaults to m / L
  double amplitude = 0.0;
  int mode = 1;
  std::vector<double> x;
  std::vector<double> values;
};

struct VelocityConfig {
  std::string kind = "zero";  // zero | sine | table
  double amplitude = 0.0;
  int mode = 1;
  std::vector<double> x;
  std::vector<double> values;
};

struct OutputConfig {
  std::string dir = "out";
  std::size_t grid_size = 512;
};

struct SimulationConfig {
  ModelConfig model;
  double m = 1.0;
  double L = 1.0;
  DensityConfig rho0;
  VelocityConfig v0;
  IntegratorConfig integrator;
  std::size_t n = 32;
  std::vector<std::size_t> n_list{8, 16, 32, 64};
  OutputConfig output;
  std::uint64_t seed = 0;  ///< reserved

  FluidModel build_model() const;
  InitialData build_initial(const FluidModel& model) const;
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise
/// ConfigError with a "$.path" to the offending field.
SimulationConfig parse_config_text(const std::string& text);
SimulationConfig parse_config(const std::filesystem::path& path);

/// Tolerance overrides from the environment:
///   PFLOW_INTEGRATOR_REL_TOL, PFLOW_INTEGRATOR_ABS_TOL,
///   PFLOW_QUAD_REL_TOL, PFLOW_QUAD_ABS_TOL
using EnvLookup = std::function<const char*(const char*)>;
void apply_env_overrides(SimulationConfig& cfg, const EnvLookup& lookup);
void apply_env_overrides(SimulationConfig& cfg);

}  // namespace pflow
