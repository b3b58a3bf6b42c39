#pragma once

#include <vector>

#include "cantilever/quadrature.hpp"

namespace cantilever {

/// Shape coefficients of one clamped-free mode
///   s(x) = c [cos(kx) - cosh(kx)] + C [sin(kx) - sinh(kx)].
struct ShapeCoefficients {
  double c = 0.0;
  double C = 0.0;
  /// (c + C) e^{kL} / c, evaluated without forming cosh or sinh of kL.
  double growth = 0.0;
};

/// Clamped-free Euler-Bernoulli eigenfunctions on [0, L], L2-normalized.
///
/// The shapes solve s'''' = k^4 s with s(0) = s'(0) = 0 and s''(L) = s'''(L) = 0.
/// Immutable after construction.
class ModeBasis {
 public:
  ModeBasis(int n_modes, double length, const QuadratureContext& quad);

  int size() const { return static_cast<int>(wavenumbers_.size()); }
  double length() const { return length_; }
  double wavenumber(int n) const;
  const std::vector<double>& wavenumbers() const { return wavenumbers_; }
  const ShapeCoefficients& coefficients(int n) const;

  /// d^order s_n / dx^order at x, with n zero-based and order in 0..4.
  double eval(int n, double x, int order) const;

  /// Samples d^order s_n at every point of `xs`.
  std::vector<double> sample(int n, std::span<const double> xs, int order) const;

 private:
  double length_;
  std::vector<double> wavenumbers_;
  std::vector<ShapeCoefficients> coeffs_;
};

/// Residual of the characteristic equation in the overflow-safe form
/// cos(kL) + 1/cosh(kL), which has the same roots as cos(kL) cosh(kL) + 1.
double characteristic_residual(double kappa, double length);

/// The n smallest positive roots of cos(kL) cosh(kL) = -1.
std::vector<double> solve_wavenumbers(int n_modes, double length);

/// C from the free-end conditions, c from L2 normalization by quadrature.
ShapeCoefficients shape_coefficients(double kappa, double length, const QuadratureContext& quad);

struct BasisReport {
  double max_gram_error = 0.0;       // max |(s_i, s_j) - delta_ij|
  double max_stiffness_error = 0.0;  // max |(s_i'', s_j'') - k_i^4 delta_ij|
  double max_stiffness_relative = 0.0;  // the same divided by k_i^2 k_j^2
  double max_characteristic_residual = 0.0;
  double max_free_end = 0.0;  // max over n of |s''(L)|/k^2 and |s'''(L)|/k^3
};

BasisReport verify_basis(const ModeBasis& basis, const QuadratureContext& quad);

}  // namespace cantilever
