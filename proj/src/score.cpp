#include "xbx/score.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "xbx/errors.hpp"
#include "xbx/fit.hpp"
#include "xbx/quad.hpp"

namespace xbx {

namespace {

// Each side of z is cut into three panels. The outer panels, an eighth of
// the width each, use the map t = end -+ h s^k so that CDFs behaving like t^p
// with small p are resolved; the middle panel is plain Gauss-Legendre.
constexpr int kEndPoints = kCrpsPointsPerSide / 4;
constexpr int kMiddlePoints = kCrpsPointsPerSide - 2 * kEndPoints;
constexpr double kGrading = 4.0;
constexpr double kEndFraction = 0.125;

const LegendreRule& end_rule() {
  static const LegendreRule rule = gauss_legendre(kEndPoints);
  return rule;
}

const LegendreRule& middle_rule() {
  static const LegendreRule rule = gauss_legendre(kMiddlePoints);
  return rule;
}

// The upper end b is never evaluated, so a CDF jump at b contributes its left
// limit.
template <class G>
double integrate(G&& g, double a, double b) {
  if (b <= a) return 0.0;
  const double h = kEndFraction * (b - a);
  const double top = std::nextafter(b, a);
  double s = 0.0;
  const LegendreRule& e = end_rule();
  for (std::size_t k = 0; k < e.nodes.size(); ++k) {
    const double x = 0.5 * (1.0 + e.nodes[k]);
    const double xk = std::pow(x, kGrading);
    const double w = 0.5 * e.weights[k] * h * kGrading * xk / x;
    s += w * (g(a + h * xk) + g(std::min(b - h * xk, top)));
  }
  const LegendreRule& m = middle_rule();
  const double half = 0.5 * (b - a - 2.0 * h);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < m.nodes.size(); ++k) s += half * m.weights[k] * g(mid + half * m.nodes[k]);
  return s;
}

}  // namespace

double crps(const MixedDistribution& d, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("crps: observation must lie in [0, 1]");
  const double below = integrate(
      [&](double t) {
        const double f = d.cdf(t);
        return f * f;
      },
      0.0, z);
  const double above = integrate(
      [&](double t) {
        const double f = 1.0 - d.cdf(t);
        return f * f;
      },
      z, 1.0);
  return below + above;
}

double total_score(const std::vector<std::unique_ptr<MixedDistribution>>& dists, const Eigen::VectorXd& z) {
  if (static_cast<Eigen::Index>(dists.size()) != z.size()) throw ShapeError("total_score: length mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += crps(*dists[static_cast<std::size_t>(i)], z(i));
  return s;
}

std::vector<double> equal_breaks(int bins) {
  if (bins < 1) throw DomainError("equal_breaks: need at least one bin");
  std::vector<double> b(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) b[static_cast<std::size_t>(k)] = static_cast<double>(k) / bins;
  b.back() = 1.0;
  return b;
}

RootogramTable rootogram(const std::vector<std::unique_ptr<MixedDistribution>>& dists,
                         const Eigen::VectorXd& y, const std::vector<double>& breaks) {
  if (breaks.size() < 2 || breaks.front() != 0.0 || breaks.back() != 1.0) {
    throw DomainError("rootogram: breaks must run from 0 to 1");
  }
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    if (!(breaks[k] > breaks[k - 1])) throw DomainError("rootogram: breaks must be increasing");
  }
  if (static_cast<Eigen::Index>(dists.size()) != y.size()) throw ShapeError("rootogram: length mismatch");
  const Eigen::Index bins = static_cast<Eigen::Index>(breaks.size()) - 1;
  RootogramTable t;
  t.breaks = breaks;
  t.observed = Eigen::VectorXd::Zero(bins);
  t.expected = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(y(i) >= 0.0 && y(i) <= 1.0)) throw DomainError("rootogram: response outside [0, 1]");
    const auto it = std::lower_bound(breaks.begin() + 1, breaks.end(), y(i));
    t.observed(it - breaks.begin() - 1) += 1.0;

    const MixedDistribution& d = *dists[static_cast<std::size_t>(i)];
    double prev = 0.0;
    for (Eigen::Index b = 0; b < bins; ++b) {
      const double cur = b + 1 == bins ? 1.0 : d.cdf(breaks[static_cast<std::size_t>(b) + 1]);
      t.expected(b) += cur - prev;
      prev = cur;
    }
  }
  return t;
}

RootogramTable rootogram(const FitResult& fit, const Dataset& data, const std::vector<double>& breaks) {
  return rootogram(fitted_distributions(fit, data), data.y, breaks);
}

void write_rootogram_csv(std::ostream& out, const RootogramTable& table) {
  out << "bin_lower,bin_upper,observed,expected,sqrt_observed,sqrt_expected,hanging_residual\n";
  out << std::setprecision(17);
  for (Eigen::Index b = 0; b < table.bins(); ++b) {
    const double so = std::sqrt(table.observed(b));
    const double se = std::sqrt(std::max(table.expected(b), 0.0));
    out << table.breaks[static_cast<std::size_t>(b)] << ',' << table.breaks[static_cast<std::size_t>(b) + 1] << ','
        << table.observed(b) << ',' << table.expected(b) << ',' << so << ',' << se << ',' << so - se << '\n';
  }
}

}  // namespace xbx
