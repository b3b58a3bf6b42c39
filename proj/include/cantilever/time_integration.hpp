#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "cantilever/dynamics.hpp"
#include "cantilever/error.hpp"
#include "cantilever/trajectory.hpp"

namespace cantilever {

/// Modal load P(t); an empty function means no load.
using LoadFunction = std::function<Eigen::VectorXd(double)>;

enum class Scheme { rk4, implicit_midpoint };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::implicit_midpoint;
  double dt = 1e-3;
  double newton_tol = 1e-10;  // relative to max(|q|, |v|) + the residual of the initial guess
  int newton_max_iter = 25;
  double blowup_threshold = 1e8;
};

void validate(const IntegratorConfig& cfg);

/// A stage or iterate became non-finite.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double t, int stage)
      : NumericalError(what), t_(t), stage_(stage) {}
  double t() const { return t_; }
  int stage() const { return stage_; }

 private:
  double t_;
  int stage_;
};

/// Newton failed to solve the implicit step equations.
class StepRejected : public NumericalError {
 public:
  StepRejected(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Classical four-stage Runge-Kutta on (q, v).
ModalState step_rk4(const DiscreteOperators& ops, const ModalState& state,
                    const LoadFunction& load, double dt);

/// Implicit midpoint: q+ = q + dt v_mid, v+ = v + dt a(t + dt/2, q_mid, v_mid), solved by Newton.
/// Uses cfg.dt as the step, which may be negative for backward steps.
ModalState step_implicit_midpoint(const DiscreteOperators& ops, const ModalState& state,
                                  const LoadFunction& load, const IntegratorConfig& cfg);

ModalState step(const DiscreteOperators& ops, const ModalState& state, const LoadFunction& load,
                const IntegratorConfig& cfg);

/// Fixed-step march to t_final, recording every `record_every` steps and at t_final.
/// Stops early, with trajectory.blowup set, when the total energy exceeds
/// cfg.blowup_threshold or the state stops being finite.
Trajectory run_simulation(const DiscreteOperators& ops, const ModalState& initial,
                          const LoadFunction& load, const IntegratorConfig& cfg, double t_final,
                          int record_every);

}  // namespace cantilever
