#pragma once

#include <cstddef>

namespace xbx {

/// Truncation control for the hypergeometric and incomplete-beta series.
struct SeriesControl {
  std::size_t max_terms = 10000;
  double rel_tol = 1e-12;
};

/// Throws DomainError unless rel_tol in (0, 1e-6] and max_terms >= 100.
void validate(const SeriesControl& ctrl);

double log_gamma(double x);

/// log B(p, q). Throws DomainError for nonpositive arguments.
double log_beta_fn(double p, double q);

/// p log z + q log(1 - z) - log B(p, q), evaluated without cancellation when
/// p and q are large.
double beta_log_power_terms(double z, double p, double q);
/// Same, reusing a precomputed log B(p, q) (only consulted when min(p, q) < 10).
double beta_log_power_terms(double z, double p, double q, double log_beta);

/// Log density of Beta(p, q) at w, with w1 = 1 - w supplied separately so that
/// rescaled arguments keep full precision near 1.
double beta_log_density(double w, double w1, double p, double q, double log_beta);

/// Regularized incomplete beta I_z(p, q) by continued fraction.
double reg_inc_beta(double z, double p, double q);

/// log I_z(p, q) and log(1 - I_z(p, q)), both accurate when the tail is tiny.
struct BetaTails {
  double log_lower;
  double log_upper;
};
BetaTails reg_inc_beta_tails(double z, double p, double q);

/// Same as reg_inc_beta_tails with log B(p, q) supplied by the caller. No
/// argument checks on p and q.
BetaTails reg_inc_beta_tails(double z, double p, double q, double log_beta);

/// Log-scale shape derivatives of both tails of I_z(p, q): d log I / dp, d log I / dq,
/// d log(1 - I) / dp, d log(1 - I) / dq. Computed from a positive-term power series
/// on whichever tail is smaller, so there is no cancellation.
struct BetaTailDerivs {
  double log_lower;
  double log_upper;
  double dlower_dp;
  double dlower_dq;
  double dupper_dp;
  double dupper_dq;
};
BetaTailDerivs reg_inc_beta_shape_derivs(double z, double p, double q);

/// Digamma function psi(x) for x > 0.
double digamma(double x);

/// 3F2(a1, a2, a3; b1, b2; z) by direct summation on z in [0, 1).
double hyp3f2(double a1, double a2, double a3, double b1, double b2, double z,
              const SeriesControl& ctrl = {});

/// Summation details, used to judge cancellation in the alternating case.
struct SeriesSum {
  double value;
  double abs_sum;  // sum of |term|
  std::size_t terms;
};
SeriesSum hyp3f2_sum(double a1, double a2, double a3, double b1, double b2, double z,
                     const SeriesControl& ctrl = {});

double std_normal_pdf(double t);
double std_normal_cdf(double t);
/// log Phi(t), finite far into the lower tail.
double log_std_normal_cdf(double t);

/// Regularized upper incomplete gamma Q(a, x).
double reg_upper_inc_gamma(double a, double x);

/// Upper tail probability of a chi-squared distribution.
double chi2_upper_tail(double statistic, int df);

}  // namespace xbx
