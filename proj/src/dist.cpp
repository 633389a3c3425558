#include "xbx/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "xbx/errors.hpp"
#include "xbx/special.hpp"

namespace xbx {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_unit_interval(double y, const char* fn) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw DomainError(std::string(fn) + ": y must lie in [0, 1], got " + std::to_string(y));
  }
}

void require_mean_precision(double mu, double phi, const char* what) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw DomainError(std::string(what) + ": mu must lie in (0, 1), got " + std::to_string(mu));
  }
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    throw DomainError(std::string(what) + ": phi must be positive and finite, got " +
                      std::to_string(phi));
  }
}

// Log beta density at w with 1 - w supplied separately (w1) for accuracy.
double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

void validate(const BetaParams& p) { require_mean_precision(p.mu, p.phi, "BetaParams"); }

void validate(const B4Params& p) {
  require_mean_precision(p.mu, p.phi, "B4Params");
  if (!(p.u1 < p.u2)) throw DomainError("B4Params: u1 must be smaller than u2");
}

void validate(const XBParams& p) {
  require_mean_precision(p.mu, p.phi, "XBParams");
  if (!(p.u >= 0.0) || !std::isfinite(p.u)) {
    throw DomainError("XBParams: u must be nonnegative and finite, got " + std::to_string(p.u));
  }
}

void validate(const XBXParams& p) {
  require_mean_precision(p.mu, p.phi, "XBXParams");
  if (!(p.nu > 0.0) || !std::isfinite(p.nu)) {
    throw DomainError("XBXParams: nu must be positive and finite, got " + std::to_string(p.nu));
  }
}

void validate(const CensNormParams& p) {
  if (!std::isfinite(p.mu)) throw DomainError("CensNormParams: mu must be finite");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw DomainError("CensNormParams: sigma must be positive and finite, got " +
                      std::to_string(p.sigma));
  }
}

double beta_logpdf(double y, const BetaParams& p) {
  validate(p);
  if (!(y > 0.0 && y < 1.0)) {
    throw DomainError("beta_logpdf: y must lie in (0, 1), got " + std::to_string(y));
  }
  const double a = p.mu * p.phi;
  const double b = (1.0 - p.mu) * p.phi;
  return beta_log_density(y, 1.0 - y, a, b, log_beta_fn(a, b));
}

double beta_pdf(double y, const BetaParams& p) { return std::exp(beta_logpdf(y, p)); }

double beta_cdf(double y, const BetaParams& p) {
  validate(p);
  require_unit_interval(y, "beta_cdf");
  return reg_inc_beta(y, p.mu * p.phi, (1.0 - p.mu) * p.phi);
}

double b4_pdf(double y, const B4Params& p) {
  validate(p);
  const double width = p.u2 - p.u1;
  if (!(y > p.u1 && y < p.u2)) return 0.0;
  const double a = p.mu * p.phi;
  const double b = (1.0 - p.mu) * p.phi;
  return std::exp(beta_log_density((y - p.u1) / width, (p.u2 - y) / width, a, b, log_beta_fn(a, b))) /
         width;
}

double xb_logpdf(double y, const XBParams& p) {
  validate(p);
  require_unit_interval(y, "xb_logpdf");
  const double a = p.mu * p.phi;
  const double b = (1.0 - p.mu) * p.phi;
  const double scale = 1.0 + 2.0 * p.u;
  if (y == 0.0 || y == 1.0) {
    if (p.u == 0.0) return kNegInf;
    const double z0 = p.u / scale;
    // P(Y* >= 1) = 1 - F_B((1 + u) / (1 + 2u)) = I_{z0}(b, a)
    return y == 0.0 ? reg_inc_beta_tails(z0, a, b).log_lower : reg_inc_beta_tails(z0, b, a).log_lower;
  }
  const double w = (y + p.u) / scale;
  const double w1 = (1.0 - y + p.u) / scale;
  return beta_log_density(w, w1, a, b, log_beta_fn(a, b)) - std::log1p(2.0 * p.u);
}

double xb_pdf(double y, const XBParams& p) { return std::exp(xb_logpdf(y, p)); }

double xb_cdf(double y, const XBParams& p) {
  validate(p);
  require_unit_interval(y, "xb_cdf");
  if (y == 1.0) return 1.0;
  return reg_inc_beta((y + p.u) / (1.0 + 2.0 * p.u), p.mu * p.phi, (1.0 - p.mu) * p.phi);
}

double xbx_logpdf(double y, const XBXParams& p, const QuadratureRule& rule) {
  validate(p);
  std::vector<double> terms(rule.order);
  for (int t = 0; t < rule.order; ++t) {
    terms[t] = rule.log_weights[t] + xb_logpdf(y, {p.mu, p.phi, p.nu * rule.nodes[t]});
  }
  return log_sum_exp(terms);
}

double xbx_pdf(double y, const XBXParams& p, const QuadratureRule& rule) {
  return std::exp(xbx_logpdf(y, p, rule));
}

double xbx_cdf(double y, const XBXParams& p, const QuadratureRule& rule) {
  validate(p);
  require_unit_interval(y, "xbx_cdf");
  if (y == 1.0) return 1.0;
  double total = 0.0;
  for (int t = 0; t < rule.order; ++t) {
    if (rule.weights[t] == 0.0) continue;
    total += rule.weights[t] * xb_cdf(y, {p.mu, p.phi, p.nu * rule.nodes[t]});
  }
  return std::min(total, 1.0);
}

LatentMoments xbx_latent_moments(const XBXParams& p) {
  validate(p);
  const double nu = p.nu;
  const double mean = (1.0 + 2.0 * nu) * p.mu - nu;
  const double d = 2.0 * p.mu - 1.0;
  const double variance =
      d * d * nu * nu + (1.0 + 4.0 * nu + 8.0 * nu * nu) * p.mu * (1.0 - p.mu) / (1.0 + p.phi);
  return {mean, variance};
}

double cn_logpdf(double y, const CensNormParams& p) {
  validate(p);
  require_unit_interval(y, "cn_logpdf");
  if (y == 0.0) return log_std_normal_cdf(-p.mu / p.sigma);
  if (y == 1.0) return log_std_normal_cdf((p.mu - 1.0) / p.sigma);
  const double t = (y - p.mu) / p.sigma;
  return -0.5 * t * t - std::log(p.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double cn_cdf(double y, const CensNormParams& p) {
  validate(p);
  require_unit_interval(y, "cn_cdf");
  if (y == 1.0) return 1.0;
  return std_normal_cdf((y - p.mu) / p.sigma);
}

double sample_beta(double a, double b, Rng& rng) {
  const double la = rng.log_gamma_variate(a);
  const double lb = rng.log_gamma_variate(b);
  return 1.0 / (1.0 + std::exp(lb - la));
}

double sample_xb(const XBParams& p, Rng& rng) {
  validate(p);
  const double b = sample_beta(p.mu * p.phi, (1.0 - p.mu) * p.phi, rng);
  if (p.u == 0.0) {
    // The beta law has no boundary mass; keep rounded draws inside (0, 1).
    return std::clamp(b, std::numeric_limits<double>::denorm_min(),
                      1.0 - std::numeric_limits<double>::epsilon() / 2.0);
  }
  const double latent = (1.0 + 2.0 * p.u) * b - p.u;
  return std::clamp(latent, 0.0, 1.0);
}

double sample_xbx_latent(const XBXParams& p, Rng& rng) {
  validate(p);
  const double u = rng.exponential(p.nu);
  const double b = sample_beta(p.mu * p.phi, (1.0 - p.mu) * p.phi, rng);
  return (1.0 + 2.0 * u) * b - u;
}

double sample_xbx(const XBXParams& p, Rng& rng) {
  return std::clamp(sample_xbx_latent(p, rng), 0.0, 1.0);
}

double MixedDistribution::censored_expectation() const { return censored_mean_numeric(*this); }

double censored_mean(const MixedDistribution& d) { return d.censored_expectation(); }

double xb_censored_mean(const XBParams& p) {
  validate(p);
  if (p.u == 0.0) return p.mu;
  const double a = p.mu * p.phi;
  const double b = (1.0 - p.mu) * p.phi;
  const double scale = 1.0 + 2.0 * p.u;
  const double z0 = p.u / scale;
  const double z1 = (1.0 + p.u) / scale;
  const BetaTails f0 = reg_inc_beta_tails(z0, a, b);
  const BetaTails f1 = reg_inc_beta_tails(z1, a, b);
  const BetaTails g0 = reg_inc_beta_tails(z0, a + 1.0, b);
  const BetaTails g1 = reg_inc_beta_tails(z1, a + 1.0, b);
  auto between = [](const BetaTails& lo, const BetaTails& hi) {
    return hi.log_lower < -0.6931471805599453 ? std::exp(hi.log_lower) - std::exp(lo.log_lower)
                                               : std::exp(lo.log_upper) - std::exp(hi.log_upper);
  };
  const double mass_mid = between(f0, f1);
  const double first_mid = between(g0, g1);
  return scale * p.mu * first_mid - p.u * mass_mid + std::exp(f1.log_upper);
}

double cn_censored_mean(const CensNormParams& p) {
  validate(p);
  const double a = -p.mu / p.sigma;
  const double b = (1.0 - p.mu) / p.sigma;
  const double mid = std_normal_cdf(b) - std_normal_cdf(a);
  return p.sigma * (std_normal_pdf(a) - std_normal_pdf(b)) + p.mu * mid + std_normal_cdf(-b);
}

double XBXDistribution::censored_expectation() const {
  double total = 0.0;
  for (int t = 0; t < rule_->order; ++t) {
    if (rule_->weights[t] == 0.0) continue;
    total += rule_->weights[t] * xb_censored_mean({p_.mu, p_.phi, p_.nu * rule_->nodes[t]});
  }
  return total;
}

double censored_mean_numeric(const MixedDistribution& d) {
  CompositeSpec spec;
  spec.uniform_panels = 40;
  spec.graded_panels = 13;
  spec.points_per_panel = 8;
  const double continuous = integrate_composite([&](double t) { return t * d.density(t); }, 0.0, 1.0, spec);
  return d.mass_at_one() + continuous;
}

double quantile(const MixedDistribution& d, double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile: prob must lie in [0, 1]");
  if (d.cdf(0.0) >= prob) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (d.cdf(mid) >= prob) hi = mid;
    else lo = mid;
  }
  return hi;
}

BetaDistribution::BetaDistribution(BetaParams p) : p_(p) { validate(p_); }

double BetaDistribution::density(double y) const { return beta_pdf(y, p_); }
double BetaDistribution::cdf(double y) const { return beta_cdf(y, p_); }

XBDistribution::XBDistribution(XBParams p) : p_(p) { validate(p_); }

double XBDistribution::mass_at_zero() const { return p_.u == 0.0 ? 0.0 : xb_pdf(0.0, p_); }
double XBDistribution::mass_at_one() const { return p_.u == 0.0 ? 0.0 : xb_pdf(1.0, p_); }
double XBDistribution::density(double y) const { return xb_pdf(y, p_); }
double XBDistribution::cdf(double y) const { return xb_cdf(y, p_); }

XBXDistribution::XBXDistribution(XBXParams p, std::shared_ptr<const QuadratureRule> rule)
    : p_(p), rule_(std::move(rule)) {
  validate(p_);
  if (!rule_) throw DomainError("XBXDistribution: missing quadrature rule");
  const double a = p_.mu * p_.phi, b = (1.0 - p_.mu) * p_.phi;
  log_beta_ = std::min(a, b) < 10.0 ? log_beta_fn(a, b) : 0.0;
}

double XBXDistribution::mass_at_zero() const { return xbx_pdf(0.0, p_, *rule_); }
double XBXDistribution::mass_at_one() const { return xbx_pdf(1.0, p_, *rule_); }
double XBXDistribution::density(double y) const { return xbx_pdf(y, p_, *rule_); }
// Same sum as xbx_cdf with log B(p, q) computed once.
double XBXDistribution::cdf(double y) const {
  require_unit_interval(y, "xbx_cdf");
  if (y == 1.0) return 1.0;
  const double a = p_.mu * p_.phi, b = (1.0 - p_.mu) * p_.phi;
  double total = 0.0;
  for (int t = 0; t < rule_->order; ++t) {
    if (rule_->weights[t] == 0.0) continue;
    const double u = p_.nu * rule_->nodes[t];
    const BetaTails tails = reg_inc_beta_tails((y + u) / (1.0 + 2.0 * u), a, b, log_beta_);
    const double f = tails.log_lower < tails.log_upper ? std::exp(tails.log_lower) : -std::expm1(tails.log_upper);
    total += rule_->weights[t] * f;
  }
  return std::min(total, 1.0);
}

CensoredNormalDistribution::CensoredNormalDistribution(CensNormParams p) : p_(p) { validate(p_); }

double CensoredNormalDistribution::mass_at_zero() const { return std_normal_cdf(-p_.mu / p_.sigma); }
double CensoredNormalDistribution::mass_at_one() const {
  return std_normal_cdf((p_.mu - 1.0) / p_.sigma);
}
double CensoredNormalDistribution::density(double y) const {
  return std_normal_pdf((y - p_.mu) / p_.sigma) / p_.sigma;
}
double CensoredNormalDistribution::cdf(double y) const { return cn_cdf(y, p_); }

}  // namespace xbx
