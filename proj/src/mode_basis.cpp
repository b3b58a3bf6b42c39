#include "cantilever/mode_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cantilever/error.hpp"

namespace cantilever {

namespace {

constexpr double kRootTolerance = 1e-15;
constexpr double kResidualLimit = 1e-12;
constexpr int kMaxRootIterations = 200;

// cos(x) + sech(x); sech is computed as 2 e^{-x} / (1 + e^{-2x}) so nothing overflows.
double reduced_characteristic(double x) {
  const double e = std::exp(-x);
  return std::cos(x) + 2.0 * e / (1.0 + e * e);
}

double find_root(double lo, double hi, int mode) {
  double flo = reduced_characteristic(lo);
  double fhi = reduced_characteristic(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) {
    throw NumericalError("solve_wavenumbers: non-finite characteristic value");
  }
  if (flo * fhi > 0.0) {
    std::ostringstream msg;
    msg << "solve_wavenumbers: no sign change for mode " << mode << " on [" << lo << ", " << hi
        << "]";
    throw NumericalError(msg.str());
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < kMaxRootIterations; ++iter) {
    // Secant candidate, rejected in favour of the midpoint when it leaves the bracket.
    double cand = hi - fhi * (hi - lo) / (fhi - flo);
    if (!(cand > lo && cand < hi) || iter % 3 == 2) cand = 0.5 * (lo + hi);
    const double fc = reduced_characteristic(cand);
    if (!std::isfinite(fc)) throw NumericalError("solve_wavenumbers: non-finite iterate");
    x = cand;
    if (std::abs(fc) <= kRootTolerance) break;
    if ((fc < 0.0) == (flo < 0.0)) {
      lo = cand;
      flo = fc;
    } else {
      hi = cand;
      fhi = fc;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      x = std::abs(flo) < std::abs(fhi) ? lo : hi;
      break;
    }
  }
  if (std::abs(reduced_characteristic(x)) > kResidualLimit) {
    std::ostringstream msg;
    msg << "solve_wavenumbers: mode " << mode << " did not converge (residual "
        << reduced_characteristic(x) << ")";
    throw NumericalError(msg.str());
  }
  return x;
}

}  // namespace

double characteristic_residual(double kappa, double length) {
  return reduced_characteristic(kappa * length);
}

std::vector<double> solve_wavenumbers(int n_modes, double length) {
  if (n_modes < 1) throw InputError("solve_wavenumbers: n must be >= 1");
  if (!(length > 0.0) || !std::isfinite(length))
    throw InputError("solve_wavenumbers: length must be positive");
  std::vector<double> out;
  out.reserve(n_modes);
  for (int n = 1; n <= n_modes; ++n) {
    const double guess = (2.0 * n - 1.0) * std::numbers::pi / 2.0;
    out.push_back(find_root(guess - 1.0, guess + 1.0, n) / length);
  }
  return out;
}

namespace {

// Evaluation from coefficients; shared by the normalization pass and ModeBasis.
double eval_shape(const ShapeCoefficients& s, double kappa, double length, double x, int order) {
  const double y = kappa * x;
  const double cy = std::cos(y);
  const double sy = std::sin(y);
  double tc = 0.0;  // d^k cos / (k^k dy^k)
  double ts = 0.0;
  switch (order % 4) {
    case 0: tc = cy; ts = sy; break;
    case 1: tc = -sy; ts = cy; break;
    case 2: tc = -cy; ts = -sy; break;
    default: tc = sy; ts = -cy; break;
  }
  const double trig = s.c * tc + s.C * ts;
  if (y <= 1.0) {
    // Near the clamp the direct form is well conditioned and vanishes exactly at x = 0.
    const double ch = order % 2 == 0 ? std::cosh(y) : std::sinh(y);
    const double sh = order % 2 == 0 ? std::sinh(y) : std::cosh(y);
    return std::pow(kappa, order) * (s.c * (tc - ch) + s.C * (ts - sh));
  }
  // c cosh y + C sinh y = ((c + C) e^y + (c - C) e^{-y}) / 2, odd orders flip the second sign.
  const double rising = s.c * s.growth * std::exp(y - kappa * length);
  const double decaying = (s.c - s.C) * std::exp(-y);
  const double hyp = 0.5 * (order % 2 == 0 ? rising + decaying : rising - decaying);
  return std::pow(kappa, order) * (trig - hyp);
}

}  // namespace

ShapeCoefficients shape_coefficients(double kappa, double length, const QuadratureContext& quad) {
  const double x = kappa * length;
  if (!(x > 0.0) || !std::isfinite(x))
    throw InputError("shape_coefficients: wavenumber must be positive and finite");
  const double denom = std::sin(x) + std::sinh(std::min(x, 700.0));
  if (std::abs(denom) < 1e-14)
    throw NumericalError("shape_coefficients: sin(kL) + sinh(kL) vanishes");

  const double e = std::exp(-x);
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  // Ratio C/c = -(cos + cosh)/(sin + sinh) with numerator and denominator scaled by 2e^{-x}.
  const double ratio = -(2.0 * cx * e + 1.0 + e * e) / (2.0 * sx * e + 1.0 - e * e);

  ShapeCoefficients s;
  s.c = 1.0;
  s.C = ratio;
  s.growth = 2.0 * (sx - cx - e) / (1.0 + 2.0 * sx * e - e * e);

  std::vector<double> sq(quad.size());
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const double v = eval_shape(s, kappa, length, quad.nodes[k], 0);
    sq[k] = v * v;
  }
  const double norm2 = integrate(quad, sq);
  if (!(norm2 > 0.0)) throw NumericalError("shape_coefficients: zero norm");
  s.c = 1.0 / std::sqrt(norm2);
  s.C = ratio * s.c;
  return s;
}

ModeBasis::ModeBasis(int n_modes, double length, const QuadratureContext& quad)
    : length_(length), wavenumbers_(solve_wavenumbers(n_modes, length)) {
  if (std::abs(quad.length - length) > 1e-13 * length)
    throw InputError("ModeBasis: quadrature length does not match beam length");
  coeffs_.reserve(wavenumbers_.size());
  for (double k : wavenumbers_) coeffs_.push_back(shape_coefficients(k, length, quad));
}

double ModeBasis::wavenumber(int n) const {
  if (n < 0 || n >= size()) throw InputError("ModeBasis: mode index out of range");
  return wavenumbers_[n];
}

const ShapeCoefficients& ModeBasis::coefficients(int n) const {
  if (n < 0 || n >= size()) throw InputError("ModeBasis: mode index out of range");
  return coeffs_[n];
}

double ModeBasis::eval(int n, double x, int order) const {
  if (n < 0 || n >= size()) throw InputError("ModeBasis: mode index out of range");
  if (order < 0 || order > 4) throw InputError("ModeBasis: derivative order must be in 0..4");
  return eval_shape(coeffs_[n], wavenumbers_[n], length_, x, order);
}

std::vector<double> ModeBasis::sample(int n, std::span<const double> xs, int order) const {
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = eval(n, xs[k], order);
  return out;
}

BasisReport verify_basis(const ModeBasis& basis, const QuadratureContext& quad) {
  BasisReport report;
  const int n = basis.size();
  std::vector<std::vector<double>> s0(n);
  std::vector<std::vector<double>> s2(n);
  for (int i = 0; i < n; ++i) {
    s0[i] = basis.sample(i, quad.nodes, 0);
    s2[i] = basis.sample(i, quad.nodes, 2);
  }
  const double L = basis.length();
  for (int i = 0; i < n; ++i) {
    const double ki = basis.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const double kj = basis.wavenumber(j);
      const double gram = inner_product(quad, s0[i], s0[j]) - (i == j ? 1.0 : 0.0);
      const double stiff =
          inner_product(quad, s2[i], s2[j]) - (i == j ? std::pow(ki, 4) : 0.0);
      report.max_gram_error = std::max(report.max_gram_error, std::abs(gram));
      report.max_stiffness_error = std::max(report.max_stiffness_error, std::abs(stiff));
      report.max_stiffness_relative =
          std::max(report.max_stiffness_relative, std::abs(stiff) / (ki * ki * kj * kj));
    }
    report.max_characteristic_residual =
        std::max(report.max_characteristic_residual, std::abs(characteristic_residual(ki, L)));
    report.max_free_end = std::max({report.max_free_end,
                                    std::abs(basis.eval(i, L, 2)) / (ki * ki),
                                    std::abs(basis.eval(i, L, 3)) / (ki * ki * ki)});
  }
  return report;
}

}  // namespace cantilever
