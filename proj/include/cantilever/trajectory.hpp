#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cantilever/assembly.hpp"
#include "cantilever/dynamics.hpp"

namespace cantilever {

/// Energy bookkeeping at one recorded instant.
struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;    // 1/2 ||w_t||^2
  double inertial = 0.0;   // iota/2 ||u_t||^2
  double bend = 0.0;       // D/2 ||w_xx||^2
  double nonlinear = 0.0;  // sigma D/2 ||w_x w_xx||^2
  double total = 0.0;
  double dissipation_rate = 0.0;  // k2 ||w_xxt||^2
  double work_rate = 0.0;         // (p, w_t)
  double dissipation_accum = 0.0;
  double work_accum = 0.0;
  double identity_residual = 0.0;  // E(t) - E(0) + dissipation - work
};

struct TrajectoryRecord {
  ModalState state;
  EnergyRecord energy;
};

/// Early termination of a run whose energy left the admissible range.
struct BlowUpReport {
  double t = 0.0;             // time at which the violation was detected
  std::string reason;
  ModalState last_finite;
};

struct Trajectory {
  BeamParameters params;
  std::vector<TrajectoryRecord> records;
  std::optional<BlowUpReport> blowup;
};

}  // namespace cantilever
