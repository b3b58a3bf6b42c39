#include "cantilever/time_integration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cantilever/diagnostics.hpp"

namespace cantilever {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::rk4 ? "rk4" : "implicit-midpoint";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "implicit-midpoint") return Scheme::implicit_midpoint;
  throw InputError("integrator.scheme: expected 'rk4' or 'implicit-midpoint', got '" + name + "'");
}

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw InputError("integrator.dt must be > 0");
  if (!(cfg.newton_tol > 0.0)) throw InputError("integrator.newton_tol must be > 0");
  if (cfg.newton_max_iter < 1) throw InputError("integrator.newton_max_iter must be >= 1");
  if (!(cfg.blowup_threshold > 0.0)) throw InputError("run.blowup_threshold must be > 0");
}

namespace {

Eigen::VectorXd load_at(const LoadFunction& load, double t) {
  return load ? load(t) : Eigen::VectorXd();
}

}  // namespace

ModalState step_rk4(const DiscreteOperators& ops, const ModalState& state,
                    const LoadFunction& load, double dt) {
  const double t = state.t;
  auto accel = [&](const ModalState& s, int stage) {
    Eigen::VectorXd a = solve_acceleration(ops, s, load_at(load, s.t));
    if (!a.allFinite()) {
      std::ostringstream msg;
      msg << "rk4: non-finite acceleration at t = " << s.t << ", stage " << stage;
      throw BlowUpError(msg.str(), s.t, stage);
    }
    return a;
  };

  const Eigen::VectorXd k1q = state.v;
  const Eigen::VectorXd k1v = accel(state, 1);
  const ModalState s2{t + 0.5 * dt, state.q + 0.5 * dt * k1q, state.v + 0.5 * dt * k1v};
  const Eigen::VectorXd k2q = s2.v;
  const Eigen::VectorXd k2v = accel(s2, 2);
  const ModalState s3{t + 0.5 * dt, state.q + 0.5 * dt * k2q, state.v + 0.5 * dt * k2v};
  const Eigen::VectorXd k3q = s3.v;
  const Eigen::VectorXd k3v = accel(s3, 3);
  const ModalState s4{t + dt, state.q + dt * k3q, state.v + dt * k3v};
  const Eigen::VectorXd k4q = s4.v;
  const Eigen::VectorXd k4v = accel(s4, 4);

  ModalState next;
  next.t = t + dt;
  next.q = state.q + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  next.v = state.v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  return next;
}

namespace {

// Step equations F(z) for z = (q+, v+).
Eigen::VectorXd midpoint_equations(const DiscreteOperators& ops, const ModalState& state,
                                   const Eigen::VectorXd& load_mid, double dt,
                                   const Eigen::VectorXd& z) {
  const int n = ops.size();
  const ModalState mid{state.t + 0.5 * dt, 0.5 * (state.q + z.head(n)),
                       0.5 * (state.v + z.tail(n))};
  Eigen::VectorXd f(2 * n);
  f.head(n) = z.head(n) - state.q - dt * mid.v;
  f.tail(n) = z.tail(n) - state.v - dt * solve_acceleration(ops, mid, load_mid);
  return f;
}

// Jacobian of the step equations: analytic linear stiffness/damping part plus a
// forward-difference correction for everything the mass matrix and nonlinear forces add.
Eigen::MatrixXd midpoint_jacobian(const DiscreteOperators& ops, const ModalState& state,
                                  const Eigen::VectorXd& load_mid, double dt,
                                  const Eigen::VectorXd& z) {
  const int n = ops.size();
  const auto& p = ops.params;
  const Eigen::ArrayXd stiff = p.D * ops.kappa4.array();
  const Eigen::ArrayXd damp = p.k2 * ops.kappa4.array();

  ModalState mid{state.t + 0.5 * dt, 0.5 * (state.q + z.head(n)), 0.5 * (state.v + z.tail(n))};
  // g = a + D k^4 q + k2 k^4 v has no linear stiffness or damping part.
  auto remainder = [&](const ModalState& s) -> Eigen::VectorXd {
    Eigen::VectorXd a = solve_acceleration(ops, s, load_mid);
    return a + (stiff * s.q.array() + damp * s.v.array()).matrix();
  };

  Eigen::MatrixXd da_dq = (-stiff).matrix().asDiagonal();
  Eigen::MatrixXd da_dv = (-damp).matrix().asDiagonal();
  const bool linear = p.sigma == 0 && p.iota == 0;
  if (!linear) {
    const Eigen::VectorXd g0 = remainder(mid);
    const double h = 1e-7 * (1.0 + mid.q.lpNorm<Eigen::Infinity>());
    const double hv = 1e-7 * (1.0 + mid.v.lpNorm<Eigen::Infinity>());
    for (int c = 0; c < n; ++c) {
      ModalState sq = mid;
      sq.q[c] += h;
      da_dq.col(c) += (remainder(sq) - g0) / h;
      ModalState sv = mid;
      sv.v[c] += hv;
      da_dv.col(c) += (remainder(sv) - g0) / hv;
    }
  }

  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  j.topRightCorner(n, n) -= 0.5 * dt * Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) -= 0.5 * dt * da_dq;
  j.bottomRightCorner(n, n) -= 0.5 * dt * da_dv;
  return j;
}

}  // namespace

ModalState step_implicit_midpoint(const DiscreteOperators& ops, const ModalState& state,
                                  const LoadFunction& load, const IntegratorConfig& cfg) {
  const int n = ops.size();
  const double dt = cfg.dt;
  const Eigen::VectorXd load_mid = load_at(load, state.t + 0.5 * dt);

  Eigen::VectorXd z(2 * n);
  z.head(n) = state.q + dt * state.v;
  z.tail(n) = state.v;

  Eigen::VectorXd f = midpoint_equations(ops, state, load_mid, dt, z);
  double res = f.lpNorm<Eigen::Infinity>();
  // Relative to the size of the step equations, so that a decayed state of size 1e-8 is
  // resolved as finely as one of size 1.
  const double tol = cfg.newton_tol * (std::max(state.q.lpNorm<Eigen::Infinity>(),
                                                state.v.lpNorm<Eigen::Infinity>()) + res);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool have_jacobian = false;
  double previous = res;
  for (int iter = 0; iter < cfg.newton_max_iter && res > tol; ++iter) {
    // Modified Newton: refresh the Jacobian only when the contraction is poor.
    if (!have_jacobian || res > 0.25 * previous) {
      lu.compute(midpoint_jacobian(ops, state, load_mid, dt, z));
      have_jacobian = true;
    }
    z -= lu.solve(f);
    if (!z.allFinite()) {
      std::ostringstream msg;
      msg << "implicit midpoint: non-finite Newton iterate at t = " << state.t;
      throw BlowUpError(msg.str(), state.t, iter + 1);
    }
    previous = res;
    f = midpoint_equations(ops, state, load_mid, dt, z);
    res = f.lpNorm<Eigen::Infinity>();
  }
  if (!std::isfinite(res)) {
    throw BlowUpError("implicit midpoint: non-finite step residual", state.t, 0);
  }
  if (res > tol) {
    std::ostringstream msg;
    msg << "implicit midpoint: Newton did not converge at t = " << state.t << " after "
        << cfg.newton_max_iter << " iterations (residual " << res << ")";
    throw StepRejected(msg.str(), res);
  }
  return {state.t + dt, z.head(n), z.tail(n)};
}

ModalState step(const DiscreteOperators& ops, const ModalState& state, const LoadFunction& load,
                const IntegratorConfig& cfg) {
  if (cfg.scheme == Scheme::rk4) return step_rk4(ops, state, load, cfg.dt);
  return step_implicit_midpoint(ops, state, load, cfg);
}

Trajectory run_simulation(const DiscreteOperators& ops, const ModalState& initial,
                          const LoadFunction& load, const IntegratorConfig& cfg, double t_final,
                          int record_every) {
  validate(cfg);
  if (record_every < 1) throw InputError("run.record_every must be >= 1");
  if (t_final < initial.t) throw InputError("run.t_final must not precede the initial time");

  Trajectory traj;
  traj.params = ops.params;
  // Dissipation and work are accumulated per step, not per record, so the identity
  // residual does not depend on the recording stride.
  double diss = 0.0, work = 0.0;
  auto rates = [&](const ModalState& s, double& d, double& w) {
    d = modal_energy(ops, s).dissipation_rate;
    const Eigen::VectorXd p = load_at(load, s.t);
    w = p.size() == 0 ? 0.0 : p.dot(s.v);
  };
  double e0 = 0.0;
  auto record = [&](const ModalState& s, double d_acc, double w_acc) {
    EnergyRecord e = make_energy_record(ops, s, load_at(load, s.t));
    if (traj.records.empty()) e0 = e.total;
    e.dissipation_accum = d_acc;
    e.work_accum = w_acc;
    e.identity_residual = e.total - e0 + d_acc - w_acc;
    traj.records.push_back({s, e});
  };
  record(initial, 0.0, 0.0);
  double d_prev = 0.0, w_prev = 0.0;
  rates(initial, d_prev, w_prev);

  const double span = t_final - initial.t;
  const long steps = span > 0.0 ? static_cast<long>(std::ceil(span / cfg.dt - 1e-9)) : 0;
  ModalState state = initial;
  IntegratorConfig step_cfg = cfg;
  for (long k = 1; k <= steps; ++k) {
    const double target = k == steps ? t_final : initial.t + static_cast<double>(k) * cfg.dt;
    step_cfg.dt = target - state.t;
    ModalState next;
    try {
      next = step(ops, state, load, step_cfg);
    } catch (const BlowUpError& e) {
      traj.blowup = BlowUpReport{e.t(), e.what(), state};
      break;
    }
    next.t = target;
    if (!next.finite()) {
      traj.blowup = BlowUpReport{target, "non-finite state", state};
      break;
    }
    const double energy = modal_energy(ops, next).total;
    double d_next = 0.0, w_next = 0.0;
    rates(next, d_next, w_next);
    const double h = target - state.t;
    const double diss_next = diss + 0.5 * h * (d_prev + d_next);
    const double work_next = work + 0.5 * h * (w_prev + w_next);
    if (!(energy <= cfg.blowup_threshold)) {
      std::ostringstream msg;
      msg << "total energy " << energy << " exceeds threshold " << cfg.blowup_threshold;
      traj.blowup = BlowUpReport{target, msg.str(), state};
      if (traj.records.back().state.t < state.t) record(state, diss, work);
      record(next, diss_next, work_next);
      break;
    }
    state = std::move(next);
    diss = diss_next;
    work = work_next;
    d_prev = d_next;
    w_prev = w_next;
    if (k % record_every == 0 || k == steps) record(state, diss, work);
  }
  if (traj.blowup && traj.records.back().state.t < traj.blowup->last_finite.t) {
    record(traj.blowup->last_finite, diss, work);
  }
  return traj;
}

}  // namespace cantilever
