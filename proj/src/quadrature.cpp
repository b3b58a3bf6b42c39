#include "cantilever/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cantilever/error.hpp"

namespace cantilever {

namespace {

void check_finite(double value, double x) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite integrand sample " << value << " at x = " << x;
    throw NumericalError(msg.str());
  }
}

std::vector<double> sample(const std::function<double(double)>& f, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(), f);
  return out;
}

}  // namespace

GaussRule gauss_legendre(int count) {
  if (count < 1) throw InputError("gauss_legendre: count must be >= 1");
  GaussRule rule;
  rule.points.resize(count);
  rule.weights.resize(count);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_count starting from the Chebyshev-like guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= count; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = count * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = 0.0;
    for (int k = 1; k <= count; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = count * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.points[i] = -z;
    rule.points[count - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  if (count % 2 == 1) rule.points[count / 2] = 0.0;
  return rule;
}

QuadratureContext build_context(int panels, int points_per_panel, double length) {
  if (panels < 1) throw InputError("quadrature: panels must be >= 1");
  if (points_per_panel < 2 || points_per_panel > 16)
    throw InputError("quadrature: points_per_panel must lie in [2, 16]");
  if (!(length > 0.0) || !std::isfinite(length))
    throw InputError("quadrature: length must be positive and finite");

  QuadratureContext quad;
  quad.length = length;
  quad.panels = panels;
  quad.points_per_panel = points_per_panel;

  const GaussRule ref = gauss_legendre(points_per_panel);
  const double h = length / panels;
  quad.nodes.reserve(static_cast<std::size_t>(panels) * points_per_panel);
  quad.weights.reserve(quad.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int k = 0; k < points_per_panel; ++k) {
      quad.nodes.push_back(a + 0.5 * h * (ref.points[k] + 1.0));
      quad.weights.push_back(0.5 * h * ref.weights[k]);
    }
  }
  quad.node_primitive = make_primitive_rule(quad, quad.nodes);
  return quad;
}

PrimitiveRule make_primitive_rule(const QuadratureContext& quad, std::span<const double> targets) {
  const GaussRule ref = gauss_legendre(quad.points_per_panel);
  const double h = quad.panel_width();
  const int m = quad.points_per_panel;

  PrimitiveRule rule;
  rule.targets.assign(targets.begin(), targets.end());
  rule.panel.resize(targets.size());
  rule.points.resize(targets.size() * m);
  rule.weights.resize(targets.size() * m);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double x = targets[t];
    if (!(x >= 0.0 && x <= quad.length))
      throw InputError("primitive rule: target outside [0, L]");
    const int p = std::min(static_cast<int>(x / h), quad.panels - 1);
    const double a = p * h;
    const double half = 0.5 * (x - a);
    rule.panel[t] = p;
    for (int k = 0; k < m; ++k) {
      rule.points[t * m + k] = a + half * (ref.points[k] + 1.0);
      rule.weights[t * m + k] = half * ref.weights[k];
    }
  }
  return rule;
}

double integrate(const QuadratureContext& quad, std::span<const double> f) {
  double sum = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    check_finite(f[k], quad.nodes[k]);
    sum += quad.weights[k] * f[k];
  }
  return sum;
}

double integrate(const QuadratureContext& quad, const std::function<double(double)>& f) {
  return integrate(quad, sample(f, quad.nodes));
}

double inner_product(const QuadratureContext& quad, std::span<const double> f,
                     std::span<const double> g) {
  double sum = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    check_finite(f[k], quad.nodes[k]);
    check_finite(g[k], quad.nodes[k]);
    sum += quad.weights[k] * (f[k] * g[k]);
  }
  return sum;
}

std::vector<double> cumulative_primitive(const QuadratureContext& quad, const PrimitiveRule& rule,
                                         std::span<const double> on_nodes,
                                         std::span<const double> on_rule_points) {
  const int m = quad.points_per_panel;
  // prefix[p] = integral over panels [0, p)
  std::vector<double> prefix(quad.panels + 1, 0.0);
  for (int p = 0; p < quad.panels; ++p) {
    double panel_sum = 0.0;
    for (int k = 0; k < m; ++k) {
      const std::size_t idx = static_cast<std::size_t>(p) * m + k;
      check_finite(on_nodes[idx], quad.nodes[idx]);
      panel_sum += quad.weights[idx] * on_nodes[idx];
    }
    prefix[p + 1] = prefix[p] + panel_sum;
  }

  std::vector<double> out(rule.targets.size());
  for (std::size_t t = 0; t < rule.targets.size(); ++t) {
    double partial = 0.0;
    for (int k = 0; k < m; ++k) {
      const std::size_t idx = t * m + k;
      check_finite(on_rule_points[idx], rule.points[idx]);
      partial += rule.weights[idx] * on_rule_points[idx];
    }
    out[t] = prefix[rule.panel[t]] + partial;
  }
  return out;
}

std::vector<double> cumulative_primitive(const QuadratureContext& quad,
                                         const std::function<double(double)>& f) {
  return cumulative_primitive(quad, quad.node_primitive, sample(f, quad.nodes),
                              sample(f, quad.node_primitive.points));
}

std::vector<double> cumulative_primitive(const QuadratureContext& quad,
                                         std::span<const double> targets,
                                         const std::function<double(double)>& f) {
  const PrimitiveRule rule = make_primitive_rule(quad, targets);
  return cumulative_primitive(quad, rule, sample(f, quad.nodes), sample(f, rule.points));
}

}  // namespace cantilever
