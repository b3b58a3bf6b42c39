#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cantilever/dynamics.hpp"
#include "cantilever/mode_basis.hpp"
#include "cantilever/quadrature.hpp"

namespace cantilever {

/// Physical-space fields of one modal state on an output grid.
struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> grid;
  std::vector<double> w, w_x, w_xx, w_xxx, w_xxxx;
  std::vector<double> u, u_t, u_tt;  // u_tt empty unless an acceleration was supplied
  std::vector<double> inext_deviation;  // w_x^4 / 4
};

enum class FieldRequest { kinematic, with_acceleration };

/// `count` uniform points on [0, L], endpoints included.
std::vector<double> uniform_grid(double length, int count = 201);

/// Reconstructs w and its x-derivatives from the modes and the in-plane fields
///   u = -1/2 int_0^x w_x^2, u_t = -int_0^x w_x w_xt, u_tt = -int_0^x [w_xt^2 + w_x w_xtt].
/// FieldRequest::with_acceleration requires `accel`; otherwise InputError.
FieldSnapshot reconstruct(const ModeBasis& basis, const QuadratureContext& quad,
                          const ModalState& state, const std::optional<Eigen::VectorXd>& accel,
                          const std::vector<double>& grid,
                          FieldRequest request = FieldRequest::kinematic);

}  // namespace cantilever
