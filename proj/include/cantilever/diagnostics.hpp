#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "cantilever/assembly.hpp"
#include "cantilever/dynamics.hpp"
#include "cantilever/mode_basis.hpp"
#include "cantilever/quadrature.hpp"
#include "cantilever/trajectory.hpp"

namespace cantilever {

/// Instantaneous energy components of one state.
struct EnergyComponents {
  double kinetic = 0.0;
  double inertial = 0.0;
  double bend = 0.0;
  double nonlinear = 0.0;
  double total = 0.0;
  double dissipation_rate = 0.0;  // k2 ||w_xxt||^2
};

/// Tensor contractions:
///   ||w_t||^2 = sum v_j^2, ||w_xx||^2 = sum k_j^4 q_j^2,
///   ||w_x w_xx||^2 = sum q_a q_b q_c q_d S(c,d,a,b), ||u_t||^2 = sum q_a v_b q_c v_d I(a,b,c,d).
EnergyComponents modal_energy(const DiscreteOperators& ops, const ModalState& state);

/// The same components by reconstructing w_x, w_xx, w_t, w_xxt and u_t on the quadrature grid.
EnergyComponents quadrature_energy(const ModeBasis& basis, const QuadratureContext& quad,
                                   const ModalState& state, const BeamParameters& params);

EnergyRecord make_energy_record(const DiscreteOperators& ops, const ModalState& state,
                                const Eigen::VectorXd& load);

struct IdentitySeries {
  std::vector<double> t;
  std::vector<double> dissipation;
  std::vector<double> work;
  std::vector<double> residual;
  double max_abs_residual = 0.0;
};

/// Trapezoid accumulation over the recorded samples only. run_simulation accumulates
/// per step instead; the two agree when every step is recorded.
IdentitySeries identity_residual_series(const Trajectory& trajectory);

/// Writes the accumulated columns of `series` back into the trajectory records.
void apply_identity_series(Trajectory& trajectory, const IdentitySeries& series);

struct InextensibilityReport {
  double algebraic_residual = 0.0;  // max |(1+u_x)^2 + w_x^2 - 1 - w_x^4/4|
  double max_abs_slope = 0.0;       // max |w_x|
  double max_deviation = 0.0;       // max w_x^4 / 4
};

/// Evaluated at the quadrature nodes with u_x = -w_x^2 / 2.
InextensibilityReport inextensibility_residual(const ModeBasis& basis,
                                               const QuadratureContext& quad,
                                               const ModalState& state);

/// Contraction formula for ||u_tt||^2 with u_tt = -sum (v_a v_b + q_a a_b) F_ab.
double inertial_acceleration_norm2(const DiscreteOperators& ops, const ModalState& state,
                                   const Eigen::VectorXd& accel);

/// 1/2 [||w_tt||^2 + D||w_xxt||^2 + D||w_xt w_xx||^2 + D||w_x w_xxt||^2] + iota/2 ||u_tt||^2.
double higher_energy_E1(const DiscreteOperators& ops, const ModalState& state,
                        const Eigen::VectorXd& accel);

struct DecayFit {
  double omega = 0.0;
  double M = 0.0;
  double r2 = 0.0;
  int samples = 0;
};

/// Least-squares line through (t, ln E) on [t_a, t_b]. Samples after the first one at or
/// below `floor` are dropped. Throws InputError if fewer than two samples remain.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& energy,
                        double t_a, double t_b, double floor);
DecayFit fit_decay_rate(const Trajectory& trajectory, double t_a, double t_b, double floor);

/// Least-squares slope of log(error) against log(dt).
double convergence_order(const std::vector<std::pair<double, double>>& dt_error);

}  // namespace cantilever
