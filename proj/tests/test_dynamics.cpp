#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "cantilever/assembly.hpp"
#include "cantilever/diagnostics.hpp"
#include "cantilever/dynamics.hpp"
#include "cantilever/error.hpp"
#include "cantilever/quadrature.hpp"
#include "oracles.hpp"

using namespace cantilever;

namespace {

struct Setup {
  Setup(int n, BeamParameters p) : quad(build_context(8, 8, 1.0)), basis(n, 1.0, quad), ops(assemble(basis, quad, p)) {}
  QuadratureContext quad;
  ModeBasis basis;
  DiscreteOperators ops;
};

BeamParameters flags(int sigma, int iota, double k2 = 0.1, double D = 1.0) {
  BeamParameters p;
  p.sigma = sigma;
  p.iota = iota;
  p.k2 = k2;
  p.D = D;
  return p;
}

}  // namespace

TEST_CASE("mass matrix is the identity when q = 0 or iota = 0") {
  Setup on(3, flags(1, 1)), off(3, flags(1, 0));
  std::mt19937_64 rng(1);
  const Eigen::VectorXd q = oracle::random_vector(rng, 3, 1.0);
  CHECK((nonlinear_mass(on.ops, Eigen::VectorXd::Zero(3)) - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
  CHECK((nonlinear_mass(off.ops, q) - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("mass matrix is symmetric with eigenvalues at least one") {
  Setup s(3, flags(1, 1));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd M = nonlinear_mass(s.ops, oracle::random_vector(rng, 3, 2.0));
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    CHECK(es.eigenvalues().minCoeff() >= 1.0 - 1e-12);
  }
}

TEST_CASE("single-mode reductions") {
  Setup s(1, flags(1, 1, 0.1, 1.7));
  ModalState st = ModalState::zero(1);
  st.q[0] = 2.0;
  const double N = stiffness_force(s.ops, st.q)[0];
  CHECK(N == doctest::Approx(16.0 * 1.7 * s.ops.S(0, 0, 0, 0)).epsilon(1e-14));

  // weak-form quadrature with w = 2 s_1, no acceleration or velocity, no inertia term
  const oracle::WeakForm wf(s.basis, 40);
  const Eigen::VectorXd r = wf.residual(flags(1, 0, 0.1, 1.7), st, Eigen::VectorXd::Zero(1));
  CHECK(r[0] == doctest::Approx(1.7 * s.ops.kappa4[0] * 2.0 + N).epsilon(1e-10));

  Eigen::VectorXd q(1), v(1);
  q << 1.0;
  v << 3.0;
  const double V = inertia_velocity_force(s.ops, q, v)[0];
  CHECK(V == doctest::Approx(9.0 * s.ops.I(0, 0, 0, 0)).epsilon(1e-14));
}

TEST_CASE("flags switch the nonlinear forces off") {
  Setup s(3, flags(0, 0));
  std::mt19937_64 rng(3);
  const Eigen::VectorXd q = oracle::random_vector(rng, 3, 1.0), v = oracle::random_vector(rng, 3, 1.0);
  CHECK(stiffness_force(s.ops, q).norm() == 0.0);
  CHECK(inertia_velocity_force(s.ops, q, v).norm() == 0.0);
  // decoupled oscillators
  ModalState st{0.0, q, v};
  const Eigen::VectorXd P = oracle::random_vector(rng, 3, 1.0);
  Eigen::VectorXd a(3);
  for (int j = 0; j < 3; ++j) a[j] = -s.ops.kappa4[j] * q[j] + P[j] - 0.1 * s.ops.kappa4[j] * v[j];
  CHECK(residual(s.ops, st, a, P).cwiseAbs().maxCoeff() < 1e-12 * s.ops.kappa4.maxCoeff());
}

TEST_CASE("stiffness force is the gradient of the quartic potential") {
  Setup s(4, flags(1, 0, 0.0, 1.3));
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd q = oracle::random_vector(rng, 4, 0.5);
    const Eigen::VectorXd N = stiffness_force(s.ops, q);
    auto potential = [&](const Eigen::VectorXd& x) {
      return modal_energy(s.ops, ModalState{0.0, x, Eigen::VectorXd::Zero(4)}).nonlinear;
    };
    for (int j = 0; j < 4; ++j) {
      const double h = 1e-5;
      Eigen::VectorXd qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const double fd = (potential(qp) - potential(qm)) / (2 * h);
      CHECK(std::abs(fd - N[j]) <= 1e-6 * std::max(1.0, N.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("homogeneity of the nonlinear terms") {
  Setup s(4, flags(1, 1));
  std::mt19937_64 rng(5);
  const Eigen::VectorXd q = oracle::random_vector(rng, 4, 1.0), v = oracle::random_vector(rng, 4, 1.0);
  const double a = 1.7, b = -0.6;
  const Eigen::VectorXd N1 = stiffness_force(s.ops, a * q), N0 = std::pow(a, 3) * stiffness_force(s.ops, q);
  CHECK((N1 - N0).cwiseAbs().maxCoeff() <= 1e-13 * N0.cwiseAbs().maxCoeff());
  const Eigen::VectorXd V1 = inertia_velocity_force(s.ops, a * q, b * v),
                        V0 = a * b * b * inertia_velocity_force(s.ops, q, v);
  CHECK((V1 - V0).cwiseAbs().maxCoeff() <= 1e-13 * V0.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd G1 = nonlinear_mass(s.ops, a * q) - I, G0 = a * a * (nonlinear_mass(s.ops, q) - I);
  CHECK((G1 - G0).cwiseAbs().maxCoeff() <= 1e-13 * G0.cwiseAbs().maxCoeff());
}

TEST_CASE("tensor residual matches the literal weak form") {
  for (auto [sigma, iota] : {std::pair{1, 1}, std::pair{1, 0}, std::pair{0, 1}}) {
    Setup s(3, flags(sigma, iota, 0.07, 1.2));
    const oracle::WeakForm wf(s.basis, 40);
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 3; ++trial) {
      ModalState st{0.0, oracle::random_vector(rng, 3, 0.5), oracle::random_vector(rng, 3, 0.5)};
      const Eigen::VectorXd a = oracle::random_vector(rng, 3, 1.0);
      const Eigen::VectorXd tensor = residual(s.ops, st, a, Eigen::VectorXd());
      const Eigen::VectorXd literal = wf.residual(s.ops.params, st, a);
      CHECK((tensor - literal).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("acceleration solve") {
  Setup s(2, flags(1, 1));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    ModalState st{0.0, oracle::random_vector(rng, 2, 1.5), oracle::random_vector(rng, 2, 1.5)};
    const Eigen::VectorXd P = oracle::random_vector(rng, 2, 1.0);
    const Eigen::VectorXd a = solve_acceleration(s.ops, st, P);
    const Eigen::MatrixXd M = nonlinear_mass(s.ops, st.q);
    const Eigen::VectorXd rhs = acceleration_rhs(s.ops, st, P);
    const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    const double a0 = (M(1, 1) * rhs[0] - M(0, 1) * rhs[1]) / det;
    const double a1 = (M(0, 0) * rhs[1] - M(1, 0) * rhs[0]) / det;
    CHECK(std::abs(a[0] - a0) <= 1e-12 * (1 + std::abs(a0)));
    CHECK(std::abs(a[1] - a1) <= 1e-12 * (1 + std::abs(a1)));
    CHECK(residual(s.ops, st, a, P).cwiseAbs().maxCoeff() <= 1e-10);
  }
  Setup lin(3, flags(1, 0));
  ModalState st{0.0, oracle::random_vector(rng, 3, 1.0), oracle::random_vector(rng, 3, 1.0)};
  CHECK((solve_acceleration(lin.ops, st, Eigen::VectorXd()) - acceleration_rhs(lin.ops, st, Eigen::VectorXd())).norm() == 0.0);
  CHECK_THROWS_AS(solve_acceleration(lin.ops, st, Eigen::VectorXd::Zero(2)), InputError);
}

TEST_CASE("Cholesky refuses an indefinite matrix and reports the pivot") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 2.0, 2.0, 1.0;
  try {
    CholeskyFactor f(A);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("pivot") != std::string::npos);
  }
  Eigen::MatrixXd B(2, 2);
  B << 4.0, 1.0, 1.0, 3.0;
  const CholeskyFactor f(B);
  CHECK(f.min_pivot() > 0.0);
  const Eigen::VectorXd x = f.solve(Eigen::Vector2d(1.0, 2.0));
  CHECK((B * x - Eigen::Vector2d(1.0, 2.0)).norm() < 1e-15);
}
