#include "cantilever/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cantilever/error.hpp"

namespace cantilever {

Eigen::MatrixXd nonlinear_mass(const DiscreteOperators& ops, const Eigen::VectorXd& q) {
  const int n = ops.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  if (ops.params.iota == 0) return m;
  for (int j = 0; j < n; ++j)
    for (int b = 0; b <= j; ++b) {
      double sum = 0.0;
      for (int a = 0; a < n; ++a) {
        double inner = 0.0;
        for (int c = 0; c < n; ++c) inner += q[c] * ops.I(a, b, c, j);
        sum += q[a] * inner;
      }
      m(j, b) += sum;
      if (b != j) m(b, j) += sum;
    }
  return m;
}

Eigen::VectorXd stiffness_force(const DiscreteOperators& ops, const Eigen::VectorXd& q) {
  const int n = ops.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (ops.params.sigma == 0) return out;
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double qab = q[a] * q[b];
        double inner = 0.0;
        for (int c = 0; c < n; ++c) inner += q[c] * (ops.S(a, j, b, c) + ops.S(a, c, b, j));
        sum += qab * inner;
      }
    out[j] = ops.params.D * sum;
  }
  return out;
}

Eigen::VectorXd inertia_velocity_force(const DiscreteOperators& ops, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& v) {
  const int n = ops.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (ops.params.iota == 0) return out;
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double inner = 0.0;
        for (int c = 0; c < n; ++c) inner += q[c] * ops.I(a, b, c, j);
        sum += v[a] * v[b] * inner;
      }
    out[j] = sum;
  }
  return out;
}

namespace {

Eigen::VectorXd load_or_zero(const Eigen::VectorXd& load, int n) {
  if (load.size() == 0) return Eigen::VectorXd::Zero(n);
  if (load.size() != n) throw InputError("modal load has the wrong length");
  return load;
}

void check_state(const DiscreteOperators& ops, const ModalState& state) {
  if (state.q.size() != ops.size() || state.v.size() != ops.size())
    throw InputError("modal state length does not match the operator size");
}

}  // namespace

Eigen::VectorXd acceleration_rhs(const DiscreteOperators& ops, const ModalState& state,
                                 const Eigen::VectorXd& load) {
  check_state(ops, state);
  const auto& p = ops.params;
  Eigen::VectorXd rhs = load_or_zero(load, ops.size());
  rhs -= (p.k2 * ops.kappa4.array() * state.v.array()).matrix();
  rhs -= (p.D * ops.kappa4.array() * state.q.array()).matrix();
  rhs -= stiffness_force(ops, state.q);
  rhs -= inertia_velocity_force(ops, state.q, state.v);
  return rhs;
}

Eigen::VectorXd residual(const DiscreteOperators& ops, const ModalState& state,
                         const Eigen::VectorXd& accel, const Eigen::VectorXd& load) {
  return nonlinear_mass(ops, state.q) * accel - acceleration_rhs(ops, state, load);
}

Eigen::VectorXd solve_acceleration(const DiscreteOperators& ops, const ModalState& state,
                                   const Eigen::VectorXd& load) {
  Eigen::VectorXd rhs = acceleration_rhs(ops, state, load);
  if (ops.params.iota == 0) return rhs;
  const Eigen::MatrixXd mass = nonlinear_mass(ops, state.q);
  const CholeskyFactor factor(mass);
  Eigen::VectorXd accel = factor.solve(rhs);
  // One refinement pass; M can carry entries far above 1 for large q.
  accel += factor.solve(rhs - mass * accel);
  return accel;
}

CholeskyFactor::CholeskyFactor(const Eigen::MatrixXd& a)
    : lower_(Eigen::MatrixXd::Zero(a.rows(), a.cols())),
      min_pivot_(std::numeric_limits<double>::infinity()) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= lower_(j, k) * lower_(j, k);
    min_pivot_ = std::min(min_pivot_, d);
    if (!(d > 0.0) || !std::isfinite(d)) {
      std::ostringstream msg;
      msg << "Cholesky factorization failed at column " << j << ": pivot " << d
          << " (mass matrix not positive definite; tensors may be corrupted)";
      throw NumericalError(msg.str());
    }
    const double ljj = std::sqrt(d);
    lower_(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = s / ljj;
    }
  }
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
  const Eigen::Index n = lower_.rows();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = b[i];
    for (Eigen::Index k = 0; k < i; ++k) s -= lower_(i, k) * y[k];
    y[i] = s / lower_(i, i);
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (Eigen::Index k = i + 1; k < n; ++k) s -= lower_(k, i) * x[k];
    x[i] = s / lower_(i, i);
  }
  return x;
}

}  // namespace cantilever
