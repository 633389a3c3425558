#include "xbx/quad.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "xbx/errors.hpp"

namespace xbx {
namespace {

// Recurrences run in long double: L_n(x) spans hundreds of orders of
// magnitude across the nodes of a large rule.
struct LaguerreEval {
  long double value;     // L_n(x)
  long double previous;  // L_{n-1}(x)
};

LaguerreEval laguerre(int n, long double x) {
  if (n == 0) return {1.0L, 0.0L};
  long double prev = 1.0L;
  long double cur = 1.0L - x;
  for (int k = 1; k < n; ++k) {
    const long double next = ((2.0L * k + 1.0L - x) * cur - k * prev) / (k + 1.0L);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

long double polish_laguerre_root(int n, long double x) {
  for (int it = 0; it < 10; ++it) {
    const auto l = laguerre(n, x);
    const long double deriv = n * (l.value - l.previous) / x;
    if (deriv == 0.0L || !std::isfinite(static_cast<double>(deriv))) break;
    const long double step = l.value / deriv;
    x -= step;
    if (std::fabs(step) <= 4.0L * std::numeric_limits<long double>::epsilon() * x) break;
  }
  return x;
}

}  // namespace

QuadratureRule gauss_laguerre(int order) {
  if (order < 1 || order > kMaxLaguerreOrder) {
    throw DomainError("gauss_laguerre: order must be in [1, " +
                      std::to_string(kMaxLaguerreOrder) + "], got " + std::to_string(order));
  }
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  rule.log_weights.resize(order);

  Eigen::VectorXd diag(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 0; k < order; ++k) diag(k) = 2.0 * k + 1.0;
  for (int k = 1; k < order; ++k) sub(k - 1) = k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& eig = solver.eigenvalues();  // ascending

  const long double log_np1 = std::log(order + 1.0L);
  for (int i = 0; i < order; ++i) {
    const long double x = polish_laguerre_root(order, eig(i));
    // w = x / ((n+1)^2 L_{n+1}(x)^2)
    const auto l = laguerre(order, x);
    const long double next = ((2.0L * order + 1.0L - x) * l.value - order * l.previous) / (order + 1.0L);
    const long double logw = std::log(x) - 2.0L * log_np1 - 2.0L * std::log(std::fabs(next));
    rule.nodes[i] = static_cast<double>(x);
    rule.log_weights[i] = static_cast<double>(logw);
    rule.weights[i] = static_cast<double>(std::exp(logw));
  }
  return rule;
}

std::shared_ptr<const QuadratureRule> laguerre_rule(int order) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  auto rule = std::make_shared<const QuadratureRule>(gauss_laguerre(order));
  cache.emplace(order, rule);
  return rule;
}

LegendreRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  LegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      deriv = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / deriv;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

int composite_points(const CompositeSpec& spec) {
  int panels = spec.uniform_panels;
  if (spec.grade_a) panels += spec.graded_panels - 1;
  if (spec.grade_b && (spec.uniform_panels > 1 || !spec.grade_a)) panels += spec.graded_panels - 1;
  return panels * spec.points_per_panel;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           const CompositeSpec& spec) {
  static std::mutex mutex;
  static std::map<int, LegendreRule> rules;
  const LegendreRule* gl = nullptr;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = rules.find(spec.points_per_panel);
    if (it == rules.end()) it = rules.emplace(spec.points_per_panel, gauss_legendre(spec.points_per_panel)).first;
    gl = &it->second;
  }
  if (!(b > a)) return 0.0;

  std::vector<double> edges;
  const double width = (b - a) / spec.uniform_panels;
  const double shrink = 0.25;
  if (spec.grade_a) {
    edges.push_back(a);
    for (int k = spec.graded_panels - 1; k >= 1; --k) edges.push_back(a + width * std::pow(shrink, k));
  }
  for (int j = spec.grade_a ? 1 : 0; j <= spec.uniform_panels; ++j) {
    if (spec.grade_b && j == spec.uniform_panels && (spec.uniform_panels > 1 || !spec.grade_a)) {
      for (int k = 1; k <= spec.graded_panels - 1; ++k) edges.push_back(b - width * std::pow(shrink, k));
      edges.push_back(b);
      break;
    }
    edges.push_back(j == spec.uniform_panels ? b : a + j * width);
  }

  double total = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e];
    const double hi = edges[e + 1];
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double panel = 0.0;
    for (std::size_t k = 0; k < gl->nodes.size(); ++k) panel += gl->weights[k] * f(mid + half * gl->nodes[k]);
    total += half * panel;
  }
  return total;
}

}  // namespace xbx
