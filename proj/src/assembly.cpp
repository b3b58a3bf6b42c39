#include "cantilever/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "cantilever/error.hpp"

namespace cantilever {

void validate(const BeamParameters& params, bool allow_undamped_inertia) {
  if (!(params.D > 0.0) || !std::isfinite(params.D)) throw InputError("beam.D must be > 0");
  if (!(params.L > 0.0) || !std::isfinite(params.L)) throw InputError("beam.L must be > 0");
  if (!(params.k2 >= 0.0) || !std::isfinite(params.k2)) throw InputError("beam.k2 must be >= 0");
  if (params.sigma != 0 && params.sigma != 1) throw InputError("beam.sigma must be 0 or 1");
  if (params.iota != 0 && params.iota != 1) throw InputError("beam.iota must be 0 or 1");
  if (params.iota == 1 && params.k2 == 0.0 && !allow_undamped_inertia) {
    throw InputError(
        "beam.k2: nonlinear inertia (iota = 1) requires Kelvin-Voigt damping k2 > 0; "
        "pass --allow-undamped-inertia to run without it");
  }
}

namespace {

struct DerivativeSamples {
  std::vector<std::vector<double>> first;   // s_a' at nodes
  std::vector<std::vector<double>> second;  // s_a'' at nodes
};

DerivativeSamples sample_derivatives(const ModeBasis& basis, const QuadratureContext& quad) {
  DerivativeSamples out;
  const int n = basis.size();
  out.first.resize(n);
  out.second.resize(n);
  for (int a = 0; a < n; ++a) {
    out.first[a] = basis.sample(a, quad.nodes, 1);
    out.second[a] = basis.sample(a, quad.nodes, 2);
  }
  return out;
}

// Replaces every entry by the mean over its orbit under the given index permutations
// and returns the largest pre-symmetrization deviation from that mean.
template <std::size_t N>
double symmetrize(Tensor4& t, const std::array<std::array<int, 4>, N>& perms) {
  const int n = t.dim();
  Tensor4 out(n);
  double worst = 0.0;
  std::array<int, 4> idx{};
  for (idx[0] = 0; idx[0] < n; ++idx[0])
    for (idx[1] = 0; idx[1] < n; ++idx[1])
      for (idx[2] = 0; idx[2] < n; ++idx[2])
        for (idx[3] = 0; idx[3] < n; ++idx[3]) {
          double sum = 0.0;
          for (const auto& p : perms) sum += t(idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]]);
          const double mean = sum / static_cast<double>(N);
          out(idx[0], idx[1], idx[2], idx[3]) = mean;
          worst = std::max(worst, std::abs(t(idx[0], idx[1], idx[2], idx[3]) - mean));
        }
  t = std::move(out);
  return worst;
}

void check_finite(const Tensor4& t, const char* name) {
  for (double v : t.data()) {
    if (!std::isfinite(v)) throw NumericalError(std::string(name) + " tensor has non-finite entries");
  }
}

}  // namespace

AssembledTensor assemble_S(const ModeBasis& basis, const QuadratureContext& quad) {
  const int n = basis.size();
  const DerivativeSamples d = sample_derivatives(basis, quad);
  const std::size_t m = quad.size();

  AssembledTensor out{Tensor4(n), 0.0};
  std::vector<double> curv(m);
  std::vector<double> slope(m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (std::size_t x = 0; x < m; ++x) curv[x] = d.second[i][x] * d.second[j][x];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          for (std::size_t x = 0; x < m; ++x) slope[x] = d.first[k][x] * d.first[l][x];
          out.tensor(i, j, k, l) = inner_product(quad, curv, slope);
        }
    }
  constexpr std::array<std::array<int, 4>, 4> perms{
      {{0, 1, 2, 3}, {1, 0, 2, 3}, {0, 1, 3, 2}, {1, 0, 3, 2}}};
  out.asymmetry = symmetrize(out.tensor, perms);
  check_finite(out.tensor, "S");
  return out;
}

AssembledTensor assemble_I(const ModeBasis& basis, const QuadratureContext& quad) {
  const int n = basis.size();
  const std::size_t m = quad.size();
  const PrimitiveRule& rule = quad.node_primitive;

  std::vector<std::vector<double>> slope_nodes(n);
  std::vector<std::vector<double>> slope_rule(n);
  for (int a = 0; a < n; ++a) {
    slope_nodes[a] = basis.sample(a, quad.nodes, 1);
    slope_rule[a] = basis.sample(a, rule.points, 1);
  }

  // F_ab at the nodes, one primitive per unordered pair.
  std::vector<std::vector<double>> prim(static_cast<std::size_t>(n) * n);
  std::vector<double> on_nodes(m);
  std::vector<double> on_rule(rule.points.size());
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      for (std::size_t x = 0; x < m; ++x) on_nodes[x] = slope_nodes[a][x] * slope_nodes[b][x];
      for (std::size_t x = 0; x < on_rule.size(); ++x)
        on_rule[x] = slope_rule[a][x] * slope_rule[b][x];
      prim[a * n + b] = cumulative_primitive(quad, rule, on_nodes, on_rule);
      prim[b * n + a] = prim[a * n + b];
    }

  AssembledTensor out{Tensor4(n), 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.tensor(i, j, k, l) = inner_product(quad, prim[i * n + j], prim[k * n + l]);

  constexpr std::array<std::array<int, 4>, 8> perms{{{0, 1, 2, 3},
                                                      {1, 0, 2, 3},
                                                      {0, 1, 3, 2},
                                                      {1, 0, 3, 2},
                                                      {2, 3, 0, 1},
                                                      {3, 2, 0, 1},
                                                      {2, 3, 1, 0},
                                                      {3, 2, 1, 0}}};
  out.asymmetry = symmetrize(out.tensor, perms);
  check_finite(out.tensor, "I");
  return out;
}

DiscreteOperators assemble(const ModeBasis& basis, const QuadratureContext& quad,
                           const BeamParameters& params) {
  DiscreteOperators ops;
  ops.params = params;
  ops.kappa4.resize(basis.size());
  for (int j = 0; j < basis.size(); ++j) ops.kappa4[j] = std::pow(basis.wavenumber(j), 4);
  AssembledTensor s = assemble_S(basis, quad);
  AssembledTensor i = assemble_I(basis, quad);
  ops.S = std::move(s.tensor);
  ops.S_asymmetry = s.asymmetry;
  ops.I = std::move(i.tensor);
  ops.I_asymmetry = i.asymmetry;
  return ops;
}

DiscreteOperators with_parameters(DiscreteOperators ops, const BeamParameters& params) {
  ops.params = params;
  return ops;
}

Eigen::VectorXd project_forcing(const std::function<double(double, double)>& p,
                                const ModeBasis& basis, const QuadratureContext& quad, double t) {
  std::vector<double> load(quad.size());
  for (std::size_t k = 0; k < quad.size(); ++k) {
    load[k] = p(quad.nodes[k], t);
    if (!std::isfinite(load[k])) {
      std::ostringstream msg;
      msg << "project_forcing: non-finite load at x = " << quad.nodes[k] << ", t = " << t;
      throw NumericalError(msg.str());
    }
  }
  Eigen::VectorXd out(basis.size());
  for (int j = 0; j < basis.size(); ++j)
    out[j] = inner_product(quad, load, basis.sample(j, quad.nodes, 0));
  return out;
}

std::string to_string(ForcingSpec::Kind kind) {
  switch (kind) {
    case ForcingSpec::Kind::zero: return "zero";
    case ForcingSpec::Kind::uniform: return "uniform";
    case ForcingSpec::Kind::harmonic: return "harmonic";
    case ForcingSpec::Kind::modal: return "modal";
  }
  return "zero";
}

ForcingSpec::Kind forcing_kind_from_string(const std::string& name) {
  if (name == "zero") return ForcingSpec::Kind::zero;
  if (name == "uniform") return ForcingSpec::Kind::uniform;
  if (name == "harmonic") return ForcingSpec::Kind::harmonic;
  if (name == "modal") return ForcingSpec::Kind::modal;
  throw InputError("forcing.preset: unrecognized preset '" + name + "'");
}

ModalForcing::ModalForcing(const ForcingSpec& spec, const ModeBasis& basis,
                           const QuadratureContext& quad)
    : spec_(spec), spatial_(Eigen::VectorXd::Zero(basis.size())), basis_(basis) {
  switch (spec.kind) {
    case ForcingSpec::Kind::zero:
      break;
    case ForcingSpec::Kind::uniform:
    case ForcingSpec::Kind::harmonic:
      spatial_ = project_forcing([](double, double) { return 1.0; }, basis, quad, 0.0);
      break;
    case ForcingSpec::Kind::modal:
      for (const auto& e : spec.profile) {
        if (e.mode < 1 || e.mode > basis.size())
          throw InputError("forcing.profile: mode index out of range");
      }
      spatial_ = project_forcing([this](double x, double) { return profile(x); }, basis, quad, 0.0);
      break;
  }
}

double ModalForcing::time_factor(double t) const {
  switch (spec_.kind) {
    case ForcingSpec::Kind::zero: return 0.0;
    case ForcingSpec::Kind::uniform: return spec_.p0;
    case ForcingSpec::Kind::harmonic: return spec_.p0 * std::sin(spec_.omega * t);
    case ForcingSpec::Kind::modal: return spec_.omega > 0.0 ? std::sin(spec_.omega * t) : 1.0;
  }
  return 0.0;
}

double ModalForcing::profile(double x) const {
  switch (spec_.kind) {
    case ForcingSpec::Kind::zero: return 0.0;
    case ForcingSpec::Kind::uniform:
    case ForcingSpec::Kind::harmonic: return 1.0;
    case ForcingSpec::Kind::modal: {
      double sum = 0.0;
      for (const auto& e : spec_.profile) sum += e.amplitude * basis_->eval(e.mode - 1, x, 0);
      return sum;
    }
  }
  return 0.0;
}

double ModalForcing::pressure(double x, double t) const { return time_factor(t) * profile(x); }

Eigen::VectorXd ModalForcing::load(double t) const { return time_factor(t) * spatial_; }

}  // namespace cantilever
