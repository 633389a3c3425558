#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace xbx {

/// Gauss-Laguerre rule for integrals of the form \int_0^inf g(x) e^{-x} dx.
///
/// Nodes are strictly increasing. Weights are also kept on the log scale
/// because for large orders the weights attached to the largest nodes fall
/// below the smallest representable double.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;
};

inline constexpr int kMaxLaguerreOrder = 256;
inline constexpr int kDefaultLaguerreOrder = 20;

/// Golub-Welsch eigen-decomposition of the Laguerre Jacobi matrix followed by
/// Newton polishing of each root. Throws DomainError unless 1 <= order <= 256.
QuadratureRule gauss_laguerre(int order);

/// Process-wide cache of gauss_laguerre(order). Thread-safe.
std::shared_ptr<const QuadratureRule> laguerre_rule(int order = kDefaultLaguerreOrder);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

LegendreRule gauss_legendre(int order);

/// Composite Gauss-Legendre integration over [a, b].
///
/// The interval is cut into `uniform_panels` equal panels. When `grade_a`
/// (`grade_b`) is set, the panel touching a (b) is further split into
/// `graded_panels` geometrically shrinking panels (ratio 4) so that integrable
/// endpoint singularities such as t^{p-1} or t^p are resolved.
struct CompositeSpec {
  int uniform_panels = 8;
  int graded_panels = 12;
  int points_per_panel = 8;
  bool grade_a = true;
  bool grade_b = true;
};

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           const CompositeSpec& spec = {});

/// Number of integrand evaluations used by integrate_composite for `spec`.
int composite_points(const CompositeSpec& spec);

}  // namespace xbx
