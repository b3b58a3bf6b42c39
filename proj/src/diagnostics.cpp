#include "cantilever/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "cantilever/error.hpp"

namespace cantilever {

namespace {

// sum x_a y_b z_c u_d T(c, d, a, b)
double contract_cdab(const Tensor4& t, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& z, const Eigen::VectorXd& u) {
  const int n = t.dim();
  double sum = 0.0;
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) {
      const double zu = z[c] * u[d];
      double inner = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) inner += x[a] * y[b] * t(c, d, a, b);
      sum += zu * inner;
    }
  return sum;
}

}  // namespace

EnergyComponents modal_energy(const DiscreteOperators& ops, const ModalState& state) {
  const auto& p = ops.params;
  const auto& q = state.q;
  const auto& v = state.v;
  EnergyComponents e;
  e.kinetic = 0.5 * v.squaredNorm();
  e.bend = 0.5 * p.D * (ops.kappa4.array() * q.array().square()).sum();
  if (p.sigma != 0) e.nonlinear = 0.5 * p.D * contract_cdab(ops.S, q, q, q, q);
  if (p.iota != 0) {
    // ||u_t||^2 = sum q_a v_b q_c v_d I(a,b,c,d) = sum q_c v_d q_a v_b I(c,d,a,b)
    e.inertial = 0.5 * contract_cdab(ops.I, q, v, q, v);
  }
  e.total = e.kinetic + e.inertial + e.bend + e.nonlinear;
  e.dissipation_rate = p.k2 * (ops.kappa4.array() * v.array().square()).sum();
  return e;
}

EnergyComponents quadrature_energy(const ModeBasis& basis, const QuadratureContext& quad,
                                   const ModalState& state, const BeamParameters& params) {
  const int n = basis.size();
  const std::size_t m = quad.size();
  const PrimitiveRule& rule = quad.node_primitive;

  auto field = [&](const Eigen::VectorXd& coeff, std::span<const double> xs, int order) {
    std::vector<double> out(xs.size(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (coeff[j] == 0.0) continue;
      for (std::size_t k = 0; k < xs.size(); ++k) out[k] += coeff[j] * basis.eval(j, xs[k], order);
    }
    return out;
  };

  const auto w_t = field(state.v, quad.nodes, 0);
  const auto w_x = field(state.q, quad.nodes, 1);
  const auto w_xx = field(state.q, quad.nodes, 2);
  const auto w_xxt = field(state.v, quad.nodes, 2);

  EnergyComponents e;
  std::vector<double> prod(m);
  e.kinetic = 0.5 * inner_product(quad, w_t, w_t);
  e.bend = 0.5 * params.D * inner_product(quad, w_xx, w_xx);
  for (std::size_t k = 0; k < m; ++k) prod[k] = w_x[k] * w_xx[k];
  if (params.sigma != 0) e.nonlinear = 0.5 * params.D * inner_product(quad, prod, prod);
  if (params.iota != 0) {
    const auto w_xt = field(state.v, quad.nodes, 1);
    const auto w_x_r = field(state.q, rule.points, 1);
    const auto w_xt_r = field(state.v, rule.points, 1);
    std::vector<double> on_nodes(m);
    std::vector<double> on_rule(rule.points.size());
    for (std::size_t k = 0; k < m; ++k) on_nodes[k] = w_x[k] * w_xt[k];
    for (std::size_t k = 0; k < on_rule.size(); ++k) on_rule[k] = w_x_r[k] * w_xt_r[k];
    const auto u_t = cumulative_primitive(quad, rule, on_nodes, on_rule);  // -u_t
    e.inertial = 0.5 * inner_product(quad, u_t, u_t);
  }
  e.total = e.kinetic + e.inertial + e.bend + e.nonlinear;
  e.dissipation_rate = params.k2 * inner_product(quad, w_xxt, w_xxt);
  return e;
}

EnergyRecord make_energy_record(const DiscreteOperators& ops, const ModalState& state,
                                const Eigen::VectorXd& load) {
  const EnergyComponents e = modal_energy(ops, state);
  EnergyRecord r;
  r.t = state.t;
  r.kinetic = e.kinetic;
  r.inertial = e.inertial;
  r.bend = e.bend;
  r.nonlinear = e.nonlinear;
  r.total = e.total;
  r.dissipation_rate = e.dissipation_rate;
  r.work_rate = load.size() == 0 ? 0.0 : load.dot(state.v);
  return r;
}

IdentitySeries identity_residual_series(const Trajectory& trajectory) {
  IdentitySeries s;
  const auto& recs = trajectory.records;
  if (recs.empty()) return s;
  const double e0 = recs.front().energy.total;
  double diss = 0.0;
  double work = 0.0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const EnergyRecord& cur = recs[k].energy;
    if (k > 0) {
      const EnergyRecord& prev = recs[k - 1].energy;
      const double h = cur.t - prev.t;
      diss += 0.5 * h * (prev.dissipation_rate + cur.dissipation_rate);
      work += 0.5 * h * (prev.work_rate + cur.work_rate);
    }
    const double r = cur.total - e0 + diss - work;
    s.t.push_back(cur.t);
    s.dissipation.push_back(diss);
    s.work.push_back(work);
    s.residual.push_back(r);
    s.max_abs_residual = std::max(s.max_abs_residual, std::abs(r));
  }
  return s;
}

void apply_identity_series(Trajectory& trajectory, const IdentitySeries& series) {
  for (std::size_t k = 0; k < trajectory.records.size() && k < series.t.size(); ++k) {
    auto& e = trajectory.records[k].energy;
    e.dissipation_accum = series.dissipation[k];
    e.work_accum = series.work[k];
    e.identity_residual = series.residual[k];
  }
}

InextensibilityReport inextensibility_residual(const ModeBasis& basis,
                                               const QuadratureContext& quad,
                                               const ModalState& state) {
  InextensibilityReport rep;
  for (double x : quad.nodes) {
    double w_x = 0.0;
    for (int j = 0; j < basis.size(); ++j) w_x += state.q[j] * basis.eval(j, x, 1);
    const double u_x = -0.5 * w_x * w_x;
    const double w4 = w_x * w_x * w_x * w_x;
    const double lhs = (1.0 + u_x) * (1.0 + u_x) + w_x * w_x;
    rep.algebraic_residual = std::max(rep.algebraic_residual, std::abs(lhs - 1.0 - 0.25 * w4));
    rep.max_abs_slope = std::max(rep.max_abs_slope, std::abs(w_x));
    rep.max_deviation = std::max(rep.max_deviation, 0.25 * w4);
  }
  return rep;
}

double inertial_acceleration_norm2(const DiscreteOperators& ops, const ModalState& state,
                                   const Eigen::VectorXd& accel) {
  const int n = ops.size();
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = state.v[i] * state.v[j] + state.q[i] * accel[j];
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double inner = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) inner += b(k, l) * ops.I(i, j, k, l);
      sum += b(i, j) * inner;
    }
  return sum;
}

double higher_energy_E1(const DiscreteOperators& ops, const ModalState& state,
                        const Eigen::VectorXd& accel) {
  const auto& p = ops.params;
  const auto& q = state.q;
  const auto& v = state.v;
  const double wtt2 = accel.squaredNorm();
  const double wxxt2 = (ops.kappa4.array() * v.array().square()).sum();
  const double wxt_wxx = contract_cdab(ops.S, v, v, q, q);
  const double wx_wxxt = contract_cdab(ops.S, q, q, v, v);
  double e1 = 0.5 * (wtt2 + p.D * (wxxt2 + wxt_wxx + wx_wxxt));
  if (p.iota != 0) e1 += 0.5 * inertial_acceleration_norm2(ops, state, accel);
  return e1;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& energy,
                        double t_a, double t_b, double floor) {
  if (t.size() != energy.size()) throw InputError("fit_decay_rate: length mismatch");
  if (!(t_b > t_a)) throw InputError("fit_decay_rate: window must satisfy t_b > t_a");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_a || t[k] > t_b) continue;
    if (!(energy[k] > floor)) break;  // truncate at the floor crossing
    xs.push_back(t[k]);
    ys.push_back(std::log(energy[k]));
  }
  if (xs.size() < 2) throw InputError("fit_decay_rate: window empty after floor filtering");

  const double count = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (sxx == 0.0) throw InputError("fit_decay_rate: all samples share one time");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (intercept + slope * xs[k]);
    ss_res += r * r;
  }
  DecayFit fit;
  fit.omega = -slope;
  fit.M = std::exp(intercept);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.samples = static_cast<int>(xs.size());
  return fit;
}

DecayFit fit_decay_rate(const Trajectory& trajectory, double t_a, double t_b, double floor) {
  std::vector<double> t;
  std::vector<double> e;
  for (const auto& r : trajectory.records) {
    t.push_back(r.energy.t);
    e.push_back(r.energy.total);
  }
  return fit_decay_rate(t, e, t_a, t_b, floor);
}

double convergence_order(const std::vector<std::pair<double, double>>& dt_error) {
  if (dt_error.size() < 3) throw InputError("convergence_order: need at least 3 points");
  for (std::size_t k = 0; k < dt_error.size(); ++k) {
    if (!(dt_error[k].first > 0.0)) throw InputError("convergence_order: dt must be positive");
    if (!(dt_error[k].second > 0.0))
      throw InputError("convergence_order: errors must be positive");
    if (k > 0 && !(dt_error[k].first < dt_error[k - 1].first))
      throw InputError("convergence_order: dt must be strictly decreasing");
  }
  const double count = static_cast<double>(dt_error.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [dt, err] : dt_error) {
    mx += std::log(dt);
    my += std::log(err);
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [dt, err] : dt_error) {
    sxx += (std::log(dt) - mx) * (std::log(dt) - mx);
    sxy += (std::log(dt) - mx) * (std::log(err) - my);
  }
  return sxy / sxx;
}

}  // namespace cantilever
