#include <doctest.h>

#include <cmath>
#include <random>

#include "cantilever/assembly.hpp"
#include "cantilever/diagnostics.hpp"
#include "cantilever/error.hpp"
#include "cantilever/field_reconstruction.hpp"
#include "cantilever/quadrature.hpp"
#include "cantilever/time_integration.hpp"
#include "oracles.hpp"

using namespace cantilever;

namespace {

struct Setup {
  Setup(int n, BeamParameters p) : quad(build_context(8, 8, 1.0)), basis(n, 1.0, quad), ops(assemble(basis, quad, p)) {}
  QuadratureContext quad;
  ModeBasis basis;
  DiscreteOperators ops;
};

BeamParameters nonlinear(double k2 = 0.05, double D = 1.0) {
  BeamParameters p;
  p.sigma = 1;
  p.iota = 1;
  p.k2 = k2;
  p.D = D;
  return p;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("modal and quadrature energies agree") {
  std::mt19937_64 rng(21);
  for (int n : {1, 3, 6}) {
    Setup s(n, nonlinear(0.05, 1.4));
    for (int trial = 0; trial < 5; ++trial) {
      ModalState st{0.0, oracle::random_vector(rng, n, 0.5), oracle::random_vector(rng, n, 0.5)};
      const EnergyComponents a = modal_energy(s.ops, st);
      const EnergyComponents b = quadrature_energy(s.basis, s.quad, st, s.ops.params);
      CHECK(relative(a.kinetic, b.kinetic) < 1e-8);
      CHECK(relative(a.bend, b.bend) < 1e-8);
      CHECK(relative(a.nonlinear, b.nonlinear) < 1e-8);
      CHECK(relative(a.inertial, b.inertial) < 1e-8);
      CHECK(relative(a.dissipation_rate, b.dissipation_rate) < 1e-8);
      CHECK(relative(a.total, b.total) < 1e-8);
    }
  }
}

TEST_CASE("single linear mode energy") {
  BeamParameters p;
  p.sigma = 0;
  p.iota = 0;
  p.D = 2.0;
  p.k2 = 0.1;
  Setup s(1, p);
  ModalState st = ModalState::zero(1);
  st.q[0] = 0.3;
  st.v[0] = -0.4;
  const EnergyComponents e = modal_energy(s.ops, st);
  CHECK(e.kinetic == doctest::Approx(0.08));
  CHECK(e.bend == doctest::Approx(0.5 * 2.0 * s.ops.kappa4[0] * 0.09));
  CHECK(e.nonlinear == 0.0);
  CHECK(e.dissipation_rate == doctest::Approx(0.1 * s.ops.kappa4[0] * 0.16));
}

TEST_CASE("identity series accumulates by the trapezoid rule") {
  Trajectory tr;
  const double ts[] = {0.0, 0.5, 1.5};
  const double diss[] = {1.0, 3.0, 2.0};
  const double work[] = {0.0, 1.0, 1.0};
  const double total[] = {10.0, 9.0, 8.0};
  for (int k = 0; k < 3; ++k) {
    TrajectoryRecord r;
    r.state = ModalState::zero(1);
    r.state.t = ts[k];
    r.energy.t = ts[k];
    r.energy.dissipation_rate = diss[k];
    r.energy.work_rate = work[k];
    r.energy.total = total[k];
    tr.records.push_back(r);
  }
  const IdentitySeries s = identity_residual_series(tr);
  CHECK(s.dissipation[1] == doctest::Approx(1.0));
  CHECK(s.dissipation[2] == doctest::Approx(1.0 + 2.5));
  CHECK(s.work[2] == doctest::Approx(0.25 + 1.0));
  // E - E0 + D - W
  CHECK(s.residual[2] == doctest::Approx(8.0 - 10.0 + 3.5 - 1.25));
  CHECK(s.residual[1] == doctest::Approx(-1.0 + 1.0 - 0.25));
  CHECK(s.max_abs_residual == doctest::Approx(0.25));
}

TEST_CASE("inextensibility algebra holds to round-off") {
  Setup s(4, nonlinear());
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    ModalState st{0.0, oracle::random_vector(rng, 4, 0.5), oracle::random_vector(rng, 4, 0.5)};
    const InextensibilityReport r = inextensibility_residual(s.basis, s.quad, st);
    const double scale = 1.0 + std::pow(r.max_abs_slope, 4);
    CHECK(r.algebraic_residual <= 1e-14 * scale);
    CHECK(r.max_deviation == doctest::Approx(0.25 * std::pow(r.max_abs_slope, 4)));
  }
}

TEST_CASE("higher energy and ||u_tt||^2 by two paths") {
  Setup s(4, nonlinear(0.05, 1.2));
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    ModalState st{0.0, oracle::random_vector(rng, 4, 0.5), oracle::random_vector(rng, 4, 0.5)};
    const Eigen::VectorXd a = solve_acceleration(s.ops, st, Eigen::VectorXd());
    const FieldSnapshot f =
        reconstruct(s.basis, s.quad, st, a, s.quad.nodes, FieldRequest::with_acceleration);
    double utt2 = 0.0, e1 = 0.0;
    for (std::size_t k = 0; k < s.quad.size(); ++k) {
      const double x = s.quad.nodes[k], w = s.quad.weights[k];
      double w_tt = 0, w_xt = 0, w_xxt = 0;
      for (int j = 0; j < 4; ++j) {
        w_tt += a[j] * s.basis.eval(j, x, 0);
        w_xt += st.v[j] * s.basis.eval(j, x, 1);
        w_xxt += st.v[j] * s.basis.eval(j, x, 2);
      }
      utt2 += w * f.u_tt[k] * f.u_tt[k];
      e1 += w * (w_tt * w_tt + 1.2 * (w_xxt * w_xxt + std::pow(w_xt * f.w_xx[k], 2) +
                                       std::pow(f.w_x[k] * w_xxt, 2)));
    }
    e1 = 0.5 * e1 + 0.5 * utt2;
    CHECK(relative(inertial_acceleration_norm2(s.ops, st, a), utt2) < 1e-8);
    CHECK(relative(higher_energy_E1(s.ops, st, a), e1) < 1e-8);
  }
}

TEST_CASE("decay fit recovers an exact exponential and honours the floor") {
  std::vector<double> t, e;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.1 * k);
    e.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  DecayFit f = fit_decay_rate(t, e, 0.0, 10.0, 0.0);
  CHECK(f.omega == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.M == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.samples == 101);

  // window
  f = fit_decay_rate(t, e, 2.0, 5.0, 0.0);
  CHECK(f.samples == 31);
  // truncation at the first sample at or below the floor
  e[50] = 0.0;
  f = fit_decay_rate(t, e, 0.0, 10.0, 1e-300);
  CHECK(f.samples == 50);
  CHECK(f.omega == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(fit_decay_rate(t, e, 0.0, 0.05, 0.0), InputError);
}

TEST_CASE("convergence order") {
  std::vector<std::pair<double, double>> pts;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) pts.emplace_back(dt, 5.0 * dt * dt);
  CHECK(convergence_order(pts) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(convergence_order({{0.1, 1.0}, {0.05, 0.5}}), InputError);
  CHECK_THROWS_AS(convergence_order({{0.1, 1.0}, {0.2, 0.5}, {0.05, 0.1}}), InputError);
  CHECK_THROWS_AS(convergence_order({{0.1, 1.0}, {0.05, 0.0}, {0.025, 0.1}}), InputError);
}
