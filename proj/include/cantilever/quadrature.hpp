#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cantilever {

/// Default composite rule. Tensor entries for up to 12 modes change by less than 1e-10
/// relative to their largest entry when the panel count is doubled from here.
inline constexpr int kDefaultPanels = 16;
inline constexpr int kDefaultPointsPerPanel = 8;

/// Gauss-Legendre points and weights on [-1, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int count);

/// Rule for the running integral F(x) = int_0^x f at a fixed set of targets.
///
/// Every target owns one block of `points_per_panel` Gauss points mapped onto
/// [start of its panel, target]. The full-panel part comes from the node
/// samples of the owning QuadratureContext.
struct PrimitiveRule {
  std::vector<double> targets;
  std::vector<int> panel;        // panel containing each target
  std::vector<double> points;    // targets.size() * points_per_panel
  std::vector<double> weights;
};

/// Composite Gauss-Legendre rule on [0, L].
struct QuadratureContext {
  double length = 0.0;
  int panels = 0;
  int points_per_panel = 0;
  std::vector<double> nodes;    // strictly increasing, interior to [0, L]
  std::vector<double> weights;
  PrimitiveRule node_primitive;  // running integral evaluated at `nodes`

  std::size_t size() const { return nodes.size(); }
  double panel_width() const { return length / panels; }
  /// Polynomial exactness degree of every panel rule.
  int degree() const { return 2 * points_per_panel - 1; }
};

QuadratureContext build_context(int panels, int points_per_panel, double length);

PrimitiveRule make_primitive_rule(const QuadratureContext& quad, std::span<const double> targets);

/// Sum of w_k f(x_k). Throws NumericalError on a non-finite sample.
double integrate(const QuadratureContext& quad, std::span<const double> f);
double integrate(const QuadratureContext& quad, const std::function<double(double)>& f);

/// Sum of w_k f(x_k) g(x_k).
double inner_product(const QuadratureContext& quad, std::span<const double> f,
                     std::span<const double> g);

/// Running integral at the rule's targets.
///
/// `on_nodes` holds f at quad.nodes, `on_rule_points` holds f at rule.points.
std::vector<double> cumulative_primitive(const QuadratureContext& quad, const PrimitiveRule& rule,
                                         std::span<const double> on_nodes,
                                         std::span<const double> on_rule_points);

/// Running integral at quad.nodes, sampling f where it is needed.
std::vector<double> cumulative_primitive(const QuadratureContext& quad,
                                         const std::function<double(double)>& f);

/// Running integral at arbitrary targets in [0, L].
std::vector<double> cumulative_primitive(const QuadratureContext& quad,
                                         std::span<const double> targets,
                                         const std::function<double(double)>& f);

}  // namespace cantilever
