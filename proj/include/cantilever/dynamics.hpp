#pragma once

#include <Eigen/Dense>

#include "cantilever/assembly.hpp"

namespace cantilever {

/// Modal coordinates q and velocities v of w(x, t) = sum_j q_j(t) s_j(x).
struct ModalState {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd v;

  static ModalState zero(int n) {
    return {0.0, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  }
  bool finite() const { return q.allFinite() && v.allFinite(); }
};

// The truncated system, tested against s_j:
//
//   sum_b M_jb(q) a_b + k2 k_j^4 v_j + D k_j^4 q_j + N_j(q) + V_j(q, v) = P_j
//
//   M_jb = delta_jb + iota sum_{a,c} q_a q_c I(a,b,c,j)
//   N_j  = sigma D sum_{a,b,c} q_a q_b q_c [S(a,j,b,c) + S(a,c,b,j)]
//   V_j  = iota sum_{a,b,c} v_a v_b q_c I(a,b,c,j)
//
// N collects (w_xx w_x, w_x s_j'') and (w_xx w_x, w_xx s_j'). M and V come from
// -(w_x int_x^L u_tt, s_j') = (u_tt, -int_0^x w_x s_j') after one integration by
// parts, with u_tt = -int_0^x [w_xt^2 + w_x w_xtt].

Eigen::MatrixXd nonlinear_mass(const DiscreteOperators& ops, const Eigen::VectorXd& q);

Eigen::VectorXd stiffness_force(const DiscreteOperators& ops, const Eigen::VectorXd& q);

Eigen::VectorXd inertia_velocity_force(const DiscreteOperators& ops, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& v);

/// M(q) a + k2 k^4 v + D k^4 q + N(q) + V(q, v) - P.
Eigen::VectorXd residual(const DiscreteOperators& ops, const ModalState& state,
                         const Eigen::VectorXd& accel, const Eigen::VectorXd& load);

/// Right-hand side P - k2 k^4 v - D k^4 q - N(q) - V(q, v).
Eigen::VectorXd acceleration_rhs(const DiscreteOperators& ops, const ModalState& state,
                                 const Eigen::VectorXd& load);

/// Solves M(q) a = acceleration_rhs(...). Throws NumericalError if M is not positive definite.
Eigen::VectorXd solve_acceleration(const DiscreteOperators& ops, const ModalState& state,
                                   const Eigen::VectorXd& load);

/// Dense Cholesky factor of a small SPD matrix.
class CholeskyFactor {
 public:
  /// Throws NumericalError carrying the smallest pivot when `a` is not positive definite.
  explicit CholeskyFactor(const Eigen::MatrixXd& a);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  double min_pivot() const { return min_pivot_; }

 private:
  Eigen::MatrixXd lower_;
  double min_pivot_ = 0.0;
};

}  // namespace cantilever
