#include "cantilever/field_reconstruction.hpp"

#include "cantilever/error.hpp"

namespace cantilever {

std::vector<double> uniform_grid(double length, int count) {
  if (count < 2) throw InputError("uniform_grid: need at least two points");
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k) grid[k] = length * k / (count - 1);
  grid.back() = length;
  return grid;
}

namespace {

std::vector<double> combine(const ModeBasis& basis, const Eigen::VectorXd& coeff,
                            std::span<const double> xs, int order) {
  std::vector<double> out(xs.size(), 0.0);
  for (int j = 0; j < basis.size(); ++j) {
    if (coeff[j] == 0.0) continue;
    for (std::size_t k = 0; k < xs.size(); ++k) out[k] += coeff[j] * basis.eval(j, xs[k], order);
  }
  return out;
}

}  // namespace

FieldSnapshot reconstruct(const ModeBasis& basis, const QuadratureContext& quad,
                          const ModalState& state, const std::optional<Eigen::VectorXd>& accel,
                          const std::vector<double>& grid, FieldRequest request) {
  if (request == FieldRequest::with_acceleration && !accel)
    throw InputError("reconstruct: u_tt requested without an acceleration");
  const int n = basis.size();
  if (state.q.size() != n || state.v.size() != n)
    throw InputError("reconstruct: state length does not match the basis");

  FieldSnapshot snap;
  snap.t = state.t;
  snap.grid = grid;
  snap.w = combine(basis, state.q, grid, 0);
  snap.w_x = combine(basis, state.q, grid, 1);
  snap.w_xx = combine(basis, state.q, grid, 2);
  snap.w_xxx = combine(basis, state.q, grid, 3);
  Eigen::VectorXd q4(n);
  for (int j = 0; j < n; ++j) q4[j] = state.q[j] * std::pow(basis.wavenumber(j), 4);
  snap.w_xxxx = combine(basis, q4, grid, 0);

  snap.inext_deviation.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = snap.w_x[k] * snap.w_x[k];
    snap.inext_deviation[k] = 0.25 * s * s;
  }

  // Primitives at the output points: whole panels from the nodes plus a mapped partial rule.
  const PrimitiveRule rule = make_primitive_rule(quad, grid);
  const auto wx_n = combine(basis, state.q, quad.nodes, 1);
  const auto wxt_n = combine(basis, state.v, quad.nodes, 1);
  const auto wx_r = combine(basis, state.q, rule.points, 1);
  const auto wxt_r = combine(basis, state.v, rule.points, 1);

  auto primitive = [&](auto&& integrand_n, auto&& integrand_r, double scale) {
    std::vector<double> on_n(quad.size());
    std::vector<double> on_r(rule.points.size());
    for (std::size_t k = 0; k < on_n.size(); ++k) on_n[k] = integrand_n(k);
    for (std::size_t k = 0; k < on_r.size(); ++k) on_r[k] = integrand_r(k);
    auto out = cumulative_primitive(quad, rule, on_n, on_r);
    for (double& v : out) v *= scale;
    return out;
  };

  snap.u = primitive([&](std::size_t k) { return wx_n[k] * wx_n[k]; },
                     [&](std::size_t k) { return wx_r[k] * wx_r[k]; }, -0.5);
  snap.u_t = primitive([&](std::size_t k) { return wx_n[k] * wxt_n[k]; },
                       [&](std::size_t k) { return wx_r[k] * wxt_r[k]; }, -1.0);
  if (accel) {
    const auto wxtt_n = combine(basis, *accel, quad.nodes, 1);
    const auto wxtt_r = combine(basis, *accel, rule.points, 1);
    snap.u_tt = primitive(
        [&](std::size_t k) { return wxt_n[k] * wxt_n[k] + wx_n[k] * wxtt_n[k]; },
        [&](std::size_t k) { return wxt_r[k] * wxt_r[k] + wx_r[k] * wxtt_r[k]; }, -1.0);
  }
  return snap;
}

}  // namespace cantilever
