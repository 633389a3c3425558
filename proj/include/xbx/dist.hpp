#pragma once

#include <memory>

#include "xbx/quad.hpp"
#include "xbx/rng.hpp"

namespace xbx {

/// Beta distribution in the mean/precision parameterization.
struct BetaParams {
  double mu;
  double phi;
};

/// Beta distribution rescaled to the support (u1, u2).
struct B4Params {
  double mu;
  double phi;
  double u1;
  double u2;
};

/// Extended-support beta: B4(mu, phi, -u, 1 + u) censored to [0, 1].
struct XBParams {
  double mu;
  double phi;
  double u;
};

/// Exponential mixture of XB distributions, u ~ Exp(mean nu).
struct XBXParams {
  double mu;
  double phi;
  double nu;
};

/// Normal latent variable censored to [0, 1] (two-limit tobit).
struct CensNormParams {
  double mu;
  double sigma;
};

void validate(const BetaParams& p);
void validate(const B4Params& p);
void validate(const XBParams& p);
void validate(const XBXParams& p);
void validate(const CensNormParams& p);

double beta_logpdf(double y, const BetaParams& p);
/// Throws DomainError unless 0 < y < 1.
double beta_pdf(double y, const BetaParams& p);
double beta_cdf(double y, const BetaParams& p);

double b4_pdf(double y, const B4Params& p);

/// Log of the three-branch XB density: log point mass at y = 0 and y = 1,
/// log density on (0, 1). With u = 0 the boundary branches are -inf.
double xb_logpdf(double y, const XBParams& p);
double xb_pdf(double y, const XBParams& p);
/// Right-continuous CDF on [0, 1]; xb_cdf(1) = 1.
double xb_cdf(double y, const XBParams& p);

/// Quadrature approximation of the XBX density (point masses at 0 and 1).
double xbx_logpdf(double y, const XBXParams& p, const QuadratureRule& rule);
double xbx_pdf(double y, const XBXParams& p, const QuadratureRule& rule);
double xbx_cdf(double y, const XBXParams& p, const QuadratureRule& rule);

struct LatentMoments {
  double mean;
  double variance;
};
/// Mean and variance of the uncensored XBX latent variable.
LatentMoments xbx_latent_moments(const XBXParams& p);

double cn_logpdf(double y, const CensNormParams& p);
double cn_cdf(double y, const CensNormParams& p);

double sample_beta(double a, double b, Rng& rng);
double sample_xb(const XBParams& p, Rng& rng);
/// Draw of the latent B4 mixture variable before censoring.
double sample_xbx_latent(const XBXParams& p, Rng& rng);
double sample_xbx(const XBXParams& p, Rng& rng);

/// A distribution on [0, 1] with point masses at both boundaries and a
/// continuous part on (0, 1).
class MixedDistribution {
 public:
  virtual ~MixedDistribution() = default;

  virtual double mass_at_zero() const = 0;
  virtual double mass_at_one() const = 0;
  /// Density of the continuous part, y in (0, 1).
  virtual double density(double y) const = 0;
  /// P(Y <= y); cdf(0) is the mass at zero and cdf(1) = 1.
  virtual double cdf(double y) const = 0;
  /// E(Y) on [0, 1]. The default integrates the continuous part numerically;
  /// the built-in families override it with closed forms.
  virtual double censored_expectation() const;
  /// Expected value of the forecast; equals censored_expectation() except for
  /// NormalDistribution.
  virtual double mean() const { return censored_expectation(); }
  /// P(Y > t).
  double prob_above(double t) const { return 1.0 - cdf(t); }
};

/// E(Y) = P(Y = 1) + \int_0^1 t f(t) dt for any mixed distribution.
double censored_mean(const MixedDistribution& d);

/// The same expectation by 512-point graded composite Gauss-Legendre on the
/// continuous part.
double censored_mean_numeric(const MixedDistribution& d);

/// Closed forms of E(Y): for XB, E[min(max((1 + 2u)B - u, 0), 1)] with
/// B ~ Beta(p, q), using E[B; B < z] = mu I_z(p + 1, q).
double xb_censored_mean(const XBParams& p);
double cn_censored_mean(const CensNormParams& p);

/// Smallest y with cdf(y) >= prob, by bisection to 1e-10.
double quantile(const MixedDistribution& d, double prob);

class BetaDistribution final : public MixedDistribution {
 public:
  explicit BetaDistribution(BetaParams p);
  double mass_at_zero() const override { return 0.0; }
  double mass_at_one() const override { return 0.0; }
  double density(double y) const override;
  double cdf(double y) const override;
  double censored_expectation() const override { return p_.mu; }
  const BetaParams& params() const { return p_; }

 private:
  BetaParams p_;
};

class XBDistribution final : public MixedDistribution {
 public:
  explicit XBDistribution(XBParams p);
  double mass_at_zero() const override;
  double mass_at_one() const override;
  double density(double y) const override;
  double cdf(double y) const override;
  double censored_expectation() const override { return xb_censored_mean(p_); }
  const XBParams& params() const { return p_; }

 private:
  XBParams p_;
};

class XBXDistribution final : public MixedDistribution {
 public:
  XBXDistribution(XBXParams p, std::shared_ptr<const QuadratureRule> rule);
  double mass_at_zero() const override;
  double mass_at_one() const override;
  double density(double y) const override;
  double cdf(double y) const override;
  double censored_expectation() const override;
  const XBXParams& params() const { return p_; }

 private:
  XBXParams p_;
  std::shared_ptr<const QuadratureRule> rule_;
  double log_beta_;
};

class CensoredNormalDistribution : public MixedDistribution {
 public:
  explicit CensoredNormalDistribution(CensNormParams p);
  double mass_at_zero() const override;
  double mass_at_one() const override;
  double density(double y) const override;
  double cdf(double y) const override;
  double censored_expectation() const override { return cn_censored_mean(p_); }
  const CensNormParams& params() const { return p_; }

 protected:
  CensNormParams p_;
};

/// Uncensored normal observed through [0, 1]: probability below 0 (above 1)
/// is reported as mass at 0 (1), but the mean is the normal mean.
class NormalDistribution final : public CensoredNormalDistribution {
 public:
  using CensoredNormalDistribution::CensoredNormalDistribution;
  double mean() const override { return p_.mu; }
};

}  // namespace xbx
