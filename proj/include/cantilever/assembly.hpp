#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cantilever/mode_basis.hpp"
#include "cantilever/quadrature.hpp"

namespace cantilever {

/// Physical constants and nonlinearity switches of the beam model.
struct BeamParameters {
  double D = 1.0;   // flexural stiffness
  double L = 1.0;   // length
  double k2 = 0.0;  // Kelvin-Voigt coefficient
  int sigma = 1;    // nonlinear stiffness on/off
  int iota = 0;     // nonlinear inertia on/off
};

/// Throws InputError unless D > 0, L > 0, k2 >= 0 and both flags are 0 or 1.
/// Nonlinear inertia without damping is refused unless `allow_undamped_inertia`.
void validate(const BeamParameters& params, bool allow_undamped_inertia = false);

/// Dense n^4 table indexed (i, j, k, l), zero-based.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_ = 0;
  std::vector<double> data_;
};

struct AssembledTensor {
  Tensor4 tensor;
  double asymmetry = 0.0;  // max deviation from the orbit mean before symmetrization
};

/// S(i,j,k,l) = int s_i'' s_j'' s_k' s_l', symmetric in i<->j and k<->l.
AssembledTensor assemble_S(const ModeBasis& basis, const QuadratureContext& quad);

/// I(i,j,k,l) = (F_ij, F_kl) with F_ab(x) = int_0^x s_a' s_b'.
/// Symmetric in i<->j, k<->l and (ij)<->(kl).
AssembledTensor assemble_I(const ModeBasis& basis, const QuadratureContext& quad);

/// Everything needed to evaluate the truncated equations of motion.
struct DiscreteOperators {
  BeamParameters params;
  Eigen::VectorXd kappa4;
  Tensor4 S;
  Tensor4 I;
  double S_asymmetry = 0.0;
  double I_asymmetry = 0.0;

  int size() const { return static_cast<int>(kappa4.size()); }
};

DiscreteOperators assemble(const ModeBasis& basis, const QuadratureContext& quad,
                           const BeamParameters& params);

/// The operator set for `params` reusing tensors assembled elsewhere.
DiscreteOperators with_parameters(DiscreteOperators ops, const BeamParameters& params);

/// P_j = (p(., t), s_j) by quadrature.
Eigen::VectorXd project_forcing(const std::function<double(double, double)>& p,
                                const ModeBasis& basis, const QuadratureContext& quad, double t);

/// Transverse load presets.
struct ForcingSpec {
  enum class Kind { zero, uniform, harmonic, modal };
  struct ModalEntry {
    int mode = 1;  // one-based
    double amplitude = 0.0;
  };
  Kind kind = Kind::zero;
  double p0 = 0.0;     // uniform amplitude
  double omega = 0.0;  // harmonic frequency; for `modal`, 0 means constant in time
  std::vector<ModalEntry> profile;
};

std::string to_string(ForcingSpec::Kind kind);
ForcingSpec::Kind forcing_kind_from_string(const std::string& name);

/// Modal load vector for a preset: spatial projections cached, time factor applied per call.
class ModalForcing {
 public:
  ModalForcing(const ForcingSpec& spec, const ModeBasis& basis, const QuadratureContext& quad);

  Eigen::VectorXd load(double t) const;
  /// p(x, t) itself, for field-level checks.
  double pressure(double x, double t) const;
  bool is_zero() const { return spec_.kind == ForcingSpec::Kind::zero; }

 private:
  double time_factor(double t) const;
  double profile(double x) const;

  ForcingSpec spec_;
  Eigen::VectorXd spatial_;  // projection of the spatial profile
  std::optional<ModeBasis> basis_;
};

}  // namespace cantilever
