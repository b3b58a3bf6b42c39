#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cantilever/assembly.hpp"
#include "cantilever/config.hpp"
#include "cantilever/diagnostics.hpp"
#include "cantilever/dynamics.hpp"
#include "cantilever/mode_basis.hpp"
#include "cantilever/quadrature.hpp"
#include "cantilever/time_integration.hpp"

namespace cantilever {

/// Everything a run needs, built from one configuration.
struct Experiment {
  QuadratureContext quad;
  ModeBasis basis;
  DiscreteOperators ops;
  ModalForcing forcing;
  ModalState initial;

  LoadFunction load() const;
};

Experiment prepare_experiment(const SimulationConfig& cfg,
                              const std::optional<std::filesystem::path>& tensor_cache = {});

struct SimulationSummary {
  std::size_t records = 0;
  EnergyRecord final_energy;
  double max_identity_residual = 0.0;
  double max_relative_energy_change = 0.0;  // max |E - E0| / E0, zero when E0 = 0
  bool blowup = false;
  double blowup_time = 0.0;
  std::string blowup_reason;
  double max_inext_residual = 0.0;   // over every snapshot
  double max_inext_deviation = 0.0;
  int snapshots = 0;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const SimulationSummary& summary);

SimulationSummary summarize(const Trajectory& trajectory);

/// Runs one configuration and writes resolved_config.json, trajectory.csv,
/// snapshots/snapshot_NNNNNN.csv and summary.json into `out_dir`.
SimulationSummary simulate_to_directory(const SimulationConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        const std::optional<std::filesystem::path>& tensor_cache,
                                        Trajectory* trajectory_out = nullptr);

struct SweepRow {
  int index = 0;
  double value = 0.0;
  std::string status;  // completed | blowup | error
  SimulationSummary summary;
  std::optional<DecayFit> decay;
  std::string message;
};

/// One run per value in its own directory run_NNN under `out_dir`, executed on `threads`
/// workers, followed by index.csv written once after every run has settled.
std::vector<SweepRow> run_sweep(const nlohmann::json& base, const std::string& param,
                                const std::vector<double>& values,
                                const std::filesystem::path& out_dir,
                                const std::optional<std::filesystem::path>& tensor_cache,
                                int threads);

void write_sweep_index(const std::filesystem::path& path, const std::string& param,
                       const std::vector<SweepRow>& rows);

/// Metrics for the converge subcommand.
enum class ConvergenceMetric { identity, energy_drift, final_state };

ConvergenceMetric convergence_metric_from_string(const std::string& name);

/// Pairs (dt, error) per trajectory file. For final_state the error of file k is the
/// max-norm difference of its final q to file k+1, so one point fewer is produced.
std::vector<std::pair<double, double>> convergence_points(
    const std::vector<std::filesystem::path>& files, ConvergenceMetric metric,
    const std::vector<double>& dts);

}  // namespace cantilever
