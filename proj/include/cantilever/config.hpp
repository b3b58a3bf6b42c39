#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cantilever/assembly.hpp"
#include "cantilever/time_integration.hpp"

namespace cantilever {

/// One initial-condition entry: q_mode(0) = q0, q_mode'(0) = v0 (mode is one-based).
struct InitialEntry {
  int mode = 1;
  double q0 = 0.0;
  double v0 = 0.0;
};

/// A fully resolved experiment definition.
struct SimulationConfig {
  BeamParameters beam;
  int n_modes = 4;
  int panels = kDefaultPanels;
  int points_per_panel = kDefaultPointsPerPanel;
  IntegratorConfig integrator;
  std::vector<InitialEntry> initial;
  ForcingSpec forcing;
  double t_final = 0.0;
  int record_every = 1;
  int snapshot_every = 0;  // in records; 0 keeps only the first and last
  int snapshot_points = 201;
  std::uint64_t seed = 0;
  bool allow_undamped_inertia = false;
};

inline constexpr int kMaxModes = 16;

/// Thrown for unreadable or malformed configuration files.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Strict parse: unknown keys and wrongly typed values are rejected, defaults filled in,
/// and the result validated.
SimulationConfig parse_config(const nlohmann::json& doc);
SimulationConfig parse_config_text(const std::string& text);
SimulationConfig load_config(const std::filesystem::path& path);

/// The raw document of a config file; parse errors carry line and column.
nlohmann::json read_config_json(const std::filesystem::path& path);

/// The resolved configuration with every key present.
nlohmann::json to_json(const SimulationConfig& cfg);

void validate(const SimulationConfig& cfg);

/// Sets the scalar at a dotted path such as "beam.k2" or "initial.0.q0".
/// Throws ConfigError if the path does not address an existing scalar.
void set_scalar(nlohmann::json& doc, const std::string& path, double value);

}  // namespace cantilever
