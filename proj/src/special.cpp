#include "xbx/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "xbx/errors.hpp"

namespace xbx {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kHalfLog2Pi = 0.91893853320467274178;

void require_positive(double v, const char* fn, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(fn) + ": " + name + " must be positive and finite, got " +
                      std::to_string(v));
  }
}

void require_unit(double z, const char* fn) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw DomainError(std::string(fn) + ": z must lie in [0, 1], got " + std::to_string(z));
  }
}

// lgamma(x) - Stirling approximation, for x >= 10.
double stirling_correction(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12.0 -
              r2 * (1.0 / 360.0 -
                    r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0)))));
}

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
double beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  const auto max_iter = static_cast<long>(300.0 + 20.0 * std::sqrt(std::max(a, b)));
  for (long m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 2.0 * kEps) return h;
  }
  throw ConvergenceError("reg_inc_beta: continued fraction did not converge", h,
                         static_cast<std::size_t>(max_iter));
}

double log1mexp(double log_x) {
  // log(1 - exp(log_x)) for log_x <= 0
  if (log_x > -std::numbers::ln2) return std::log(-std::expm1(log_x));
  return std::log1p(-std::exp(log_x));
}

struct SmallTailSeries {
  double log_value;
  double dfirst;   // d log I / da
  double dsecond;  // d log I / db
};

// I_x(a, b) = x^a (1-x)^b / (a B(a, b)) * sum_k (a+b)_k / (a+1)_k x^k,
// differentiated term by term. Requires x <= a / (a + b) so the terms decay
// monotonically.
SmallTailSeries small_tail_series(double x, double a, double b) {
  const double s = a + b;
  double term = 1.0;
  double total = 1.0;
  double w_first = 0.0;   // sum_j<k 1/(s+j) - 1/(a+1+j)
  double w_second = 0.0;  // sum_j<k 1/(s+j)
  double acc_first = 0.0;
  double acc_second = 0.0;
  constexpr std::size_t max_terms = 2000000;
  std::size_t k = 0;
  for (; k < max_terms; ++k) {
    const double ratio = x * (s + k) / (a + 1.0 + k);
    w_first += 1.0 / (s + k) - 1.0 / (a + 1.0 + k);
    w_second += 1.0 / (s + k);
    term *= ratio;
    total += term;
    acc_first += term * w_first;
    acc_second += term * w_second;
    const double bound = std::max(ratio, x);
    const double tail = term * bound / (1.0 - bound);
    if (tail <= 1e-17 * total && tail * (1.0 + w_second) <= 1e-17 * (total + acc_second)) break;
  }
  if (k == max_terms) {
    throw ConvergenceError("reg_inc_beta_shape_derivs: series did not converge", total, k);
  }
  SmallTailSeries out;
  out.log_value = beta_log_power_terms(x, a, b) - std::log(a) + std::log(total);
  const double psi_s = digamma(s);
  out.dfirst = std::log(x) - 1.0 / a - digamma(a) + psi_s + acc_first / total;
  out.dsecond = std::log1p(-x) - digamma(b) + psi_s + acc_second / total;
  return out;
}

}  // namespace

void validate(const SeriesControl& ctrl) {
  if (!(ctrl.rel_tol > 0.0 && ctrl.rel_tol <= 1e-6)) {
    throw DomainError("SeriesControl: rel_tol must lie in (0, 1e-6]");
  }
  if (ctrl.max_terms < 100) throw DomainError("SeriesControl: max_terms must be >= 100");
}

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta_fn(double p, double q) {
  require_positive(p, "log_beta_fn", "p");
  require_positive(q, "log_beta_fn", "q");
  if (std::min(p, q) >= 10.0 && std::max(p, q) >= 1e4) {
    const double s = p + q;
    const double lp = p > q ? std::log1p(-q / s) : std::log(p / s);
    const double lq = q > p ? std::log1p(-p / s) : std::log(q / s);
    return (p - 0.5) * lp + (q - 0.5) * lq - 0.5 * std::log(s) +
           kHalfLog2Pi + stirling_correction(p) + stirling_correction(q) - stirling_correction(s);
  }
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

double beta_log_power_terms(double z, double p, double q) {
  return beta_log_power_terms(z, p, q, std::min(p, q) < 10.0 ? log_beta_fn(p, q) : 0.0);
}

double beta_log_power_terms(double z, double p, double q, double log_beta) {
  if (z <= 0.0 || z >= 1.0) return -kInf;
  if (std::min(p, q) < 10.0) return p * std::log(z) + q * std::log1p(-z) - log_beta;
  const double s = p + q;
  const double x0 = p / s;
  const double dz = z - x0;
  const double lz = std::abs(dz) < 0.5 * x0 ? std::log1p(dz / x0) : std::log(z / x0);
  const double lz1 = std::abs(dz) < 0.5 * (q / s) ? std::log1p(-dz / (q / s)) : std::log((1.0 - z) / (q / s));
  return p * lz + q * lz1 + 0.5 * std::log(p * (q / s)) - kHalfLog2Pi - stirling_correction(p) -
         stirling_correction(q) + stirling_correction(s);
}

double beta_log_density(double w, double w1, double p, double q, double log_beta) {
  if (std::min(p, q) < 10.0) return (p - 1.0) * std::log(w) + (q - 1.0) * std::log(w1) - log_beta;
  return beta_log_power_terms(w, p, q, log_beta) - std::log(w) - std::log(w1);
}

BetaTails reg_inc_beta_tails(double z, double p, double q) {
  require_positive(p, "reg_inc_beta", "p");
  require_positive(q, "reg_inc_beta", "q");
  return reg_inc_beta_tails(z, p, q, std::min(p, q) < 10.0 ? log_beta_fn(p, q) : 0.0);
}

BetaTails reg_inc_beta_tails(double z, double p, double q, double log_beta) {
  require_unit(z, "reg_inc_beta");
  if (z == 0.0) return {-kInf, 0.0};
  if (z == 1.0) return {0.0, -kInf};
  const double power = beta_log_power_terms(z, p, q, log_beta);
  if (z * (p + q + 2.0) < p + 1.0) {
    const double lower = power - std::log(p) + std::log(beta_cf(z, p, q));
    return {lower, log1mexp(std::min(lower, 0.0))};
  }
  const double upper = power - std::log(q) + std::log(beta_cf(1.0 - z, q, p));
  return {log1mexp(std::min(upper, 0.0)), upper};
}

double reg_inc_beta(double z, double p, double q) {
  const auto tails = reg_inc_beta_tails(z, p, q);
  if (tails.log_lower < tails.log_upper) return std::exp(tails.log_lower);
  return -std::expm1(tails.log_upper);
}

BetaTailDerivs reg_inc_beta_shape_derivs(double z, double p, double q) {
  require_positive(p, "reg_inc_beta_shape_derivs", "p");
  require_positive(q, "reg_inc_beta_shape_derivs", "q");
  if (!(z > 0.0 && z < 1.0)) throw DomainError("reg_inc_beta_shape_derivs: z must lie in (0, 1)");
  BetaTailDerivs out{};
  if (z * (p + q) <= p) {
    const auto s = small_tail_series(z, p, q);
    out.log_lower = s.log_value;
    out.dlower_dp = s.dfirst;
    out.dlower_dq = s.dsecond;
    out.log_upper = log1mexp(std::min(s.log_value, 0.0));
    const double ratio = -std::exp(out.log_lower - out.log_upper);
    out.dupper_dp = ratio * out.dlower_dp;
    out.dupper_dq = ratio * out.dlower_dq;
  } else {
    // 1 - I_z(p, q) = I_{1-z}(q, p)
    const auto s = small_tail_series(1.0 - z, q, p);
    out.log_upper = s.log_value;
    out.dupper_dq = s.dfirst;
    out.dupper_dp = s.dsecond;
    out.log_lower = log1mexp(std::min(s.log_value, 0.0));
    const double ratio = -std::exp(out.log_upper - out.log_lower);
    out.dlower_dp = ratio * out.dupper_dp;
    out.dlower_dq = ratio * out.dupper_dq;
  }
  return out;
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("digamma: x must be positive and finite, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / x;
  const double r2 = r * r;
  const double series =
      r2 * (1.0 / 12.0 -
            r2 * (1.0 / 120.0 -
                  r2 * (1.0 / 252.0 -
                        r2 * (1.0 / 240.0 - r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0 - r2 / 12.0))))));
  return shift + std::log(x) - 0.5 * r - series;
}

SeriesSum hyp3f2_sum(double a1, double a2, double a3, double b1, double b2, double z,
                     const SeriesControl& ctrl) {
  validate(ctrl);
  auto nonpositive_integer = [](double b) { return b <= 0.0 && b == std::floor(b); };
  if (nonpositive_integer(b1) || nonpositive_integer(b2)) {
    throw DomainError("hyp3f2: lower parameters must not be nonpositive integers");
  }
  if (!(z >= 0.0 && z < 1.0)) throw DomainError("hyp3f2: z must lie in [0, 1)");
  double term = 1.0;
  double sum = 1.0;
  double abs_sum = 1.0;
  int small_run = 0;
  for (std::size_t k = 0; k < ctrl.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    term *= (a1 + kk) * (a2 + kk) * (a3 + kk) / ((b1 + kk) * (b2 + kk) * (kk + 1.0)) * z;
    sum += term;
    abs_sum += std::abs(term);
    if (!std::isfinite(sum)) break;
    if (std::abs(term) <= ctrl.rel_tol * std::abs(sum)) {
      if (++small_run == 3) return {sum, abs_sum, k + 2};
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("hyp3f2: series did not converge", sum, ctrl.max_terms);
}

double hyp3f2(double a1, double a2, double a3, double b1, double b2, double z,
              const SeriesControl& ctrl) {
  return hyp3f2_sum(a1, a2, a3, b1, b2, z, ctrl).value;
}

double std_normal_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

double log_std_normal_cdf(double t) {
  if (t > 5.0) return std::log1p(-0.5 * std::erfc(t / std::numbers::sqrt2));
  if (t > -35.0) return std::log(0.5 * std::erfc(-t / std::numbers::sqrt2));
  // Asymptotic expansion of the Mills ratio.
  const double r2 = 1.0 / (t * t);
  const double series = 1.0 - r2 * (1.0 - r2 * (3.0 - r2 * (15.0 - r2 * 105.0)));
  return -0.5 * t * t - std::log(-t) - kHalfLog2Pi + std::log(series);
}

double reg_upper_inc_gamma(double a, double x) {
  require_positive(a, "reg_upper_inc_gamma", "a");
  if (!(x >= 0.0)) throw DomainError("reg_upper_inc_gamma: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_pref = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 100000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * kEps) return -std::expm1(log_pref + std::log(sum));
    }
    throw ConvergenceError("reg_upper_inc_gamma: series did not converge", sum, 100000);
  }
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return std::exp(log_pref + std::log(h));
  }
  throw ConvergenceError("reg_upper_inc_gamma: continued fraction did not converge", h, 100000);
}

double chi2_upper_tail(double statistic, int df) {
  if (df < 1) throw DomainError("chi2_upper_tail: df must be positive");
  if (!(statistic >= 0.0)) throw DomainError("chi2_upper_tail: statistic must be nonnegative");
  return reg_upper_inc_gamma(0.5 * df, 0.5 * statistic);
}

}  // namespace xbx
