#include "xbx/xb_kernel.hpp"

#include <cmath>
#include <limits>

#include "xbx/errors.hpp"

namespace xbx {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Derivative accuracy demanded from the 3F2 route before it is trusted.
constexpr double kDerivTol = 1e-9;
// Beyond this argument the 3F2 series needs too many terms to be worth trying.
constexpr double kMaxSeriesArg = 0.9;

// sign(V) * h(x; a, b) on the log scale.
struct LogH {
  double log_abs;
  double sign;
  double rel_err;
};

LogH log_h(double x, double a, double b, double log_beta, const SeriesControl& ctrl) {
  const SeriesSum s = hyp3f2_sum(a, a, 1.0 - b, a + 1.0, a + 1.0, x, ctrl);
  if (s.value == 0.0) throw ConvergenceError("3F2 sum vanished", 0.0, s.terms);
  LogH out;
  out.sign = s.value < 0.0 ? -1.0 : 1.0;
  out.log_abs = a * std::log(x) - 2.0 * std::log(a) - log_beta + std::log(std::abs(s.value));
  out.rel_err = 4.0 * kEps * (s.abs_sum / std::abs(s.value)) * static_cast<double>(s.terms < 64 ? 8 : 16);
  return out;
}

// d log I_x(a, b) / da through 3F2.
double first_ratio_3f2(double x, double a, double b, double log_beta, double psi_a, double psi_ab,
                       double log_tail) {
  const LogH h = log_h(x, a, b, log_beta, {});
  const double lead = psi_ab - psi_a + std::log(x);
  const double hr = h.sign * std::exp(h.log_abs - log_tail);
  const double value = lead - hr;
  const double err = 8.0 * kEps * std::abs(lead) + std::abs(hr) * h.rel_err;
  if (!std::isfinite(value) || err > kDerivTol * (1.0 + std::abs(value))) {
    throw ConvergenceError("3F2 derivative lost precision", value, 0);
  }
  return value;
}

// d log I_x(a, b) / db through the reflected 3F2 expression at 1 - x.
double second_ratio_3f2(double x, double a, double b, double log_beta, double psi_b, double psi_ab,
                        double log_tail) {
  const double y = 1.0 - x;
  if (y > kMaxSeriesArg) throw ConvergenceError("3F2 argument too close to 1", 0.0, 0);
  const LogH h = log_h(y, b, a, log_beta, {});
  const double tail = std::exp(log_tail);
  const double lead = -std::expm1(log_tail) * (psi_ab - psi_b + std::log(y));
  const double hv = h.sign * std::exp(h.log_abs);
  const double value = -(lead - hv) / tail;
  const double err = (8.0 * kEps * std::abs(lead) + std::abs(hv) * h.rel_err) / tail;
  if (!std::isfinite(value) || err > kDerivTol * (1.0 + std::abs(value))) {
    throw ConvergenceError("3F2 derivative lost precision", value, 0);
  }
  return value;
}

}  // namespace

ShapeCache make_shape_cache(double mu, double phi) {
  ShapeCache s;
  s.mu = mu;
  s.phi = phi;
  s.p = mu * phi;
  s.q = (1.0 - mu) * phi;
  s.log_beta = log_beta_fn(s.p, s.q);
  s.psi_p = digamma(s.p);
  s.psi_q = digamma(s.q);
  s.psi_phi = digamma(phi);
  return s;
}

QRH qrh_functions(double z, double mu, double phi, const SeriesControl& ctrl) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("qrh_functions: z must lie in (0, 1)");
  if (!(mu > 0.0 && mu < 1.0) || !(phi > 0.0) || !std::isfinite(phi)) {
    throw DomainError("qrh_functions: need 0 < mu < 1 and phi > 0");
  }
  validate(ctrl);
  const double p = mu * phi;
  const double q = (1.0 - mu) * phi;
  const double lb = log_beta_fn(p, q);
  const double psi_phi = digamma(phi);

  const LogH hz = log_h(z, p, q, lb, ctrl);
  const LogH hw = log_h(1.0 - z, q, p, lb, ctrl);
  QRH out;
  out.h = hz.sign * std::exp(hz.log_abs);
  const double h_reflected = hw.sign * std::exp(hw.log_abs);
  out.q = reg_inc_beta(z, p, q) * (psi_phi - digamma(p) + std::log(z)) - out.h;
  const double q_reflected =
      reg_inc_beta(1.0 - z, q, p) * (psi_phi - digamma(q) + std::log1p(-z)) - h_reflected;
  out.r = -q_reflected;
  return out;
}

double h_function(double z, double mu, double phi, const SeriesControl& ctrl) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("h_function: z must lie in (0, 1)");
  if (!(mu > 0.0 && mu < 1.0) || !(phi > 0.0) || !std::isfinite(phi)) {
    throw DomainError("h_function: need 0 < mu < 1 and phi > 0");
  }
  validate(ctrl);
  const double p = mu * phi;
  const double q = (1.0 - mu) * phi;
  const LogH h = log_h(z, p, q, log_beta_fn(p, q), ctrl);
  return h.sign * std::exp(h.log_abs);
}

TailLogDerivs lower_tail_log_derivs(double x, double a, double b, double log_beta, double psi_a,
                                    double psi_b, double psi_ab) {
  TailLogDerivs out{};
  out.log_tail = reg_inc_beta_tails(x, a, b, log_beta).log_lower;
  bool have_a = false;
  bool have_b = false;
  try {
    out.dlog_da = first_ratio_3f2(x, a, b, log_beta, psi_a, psi_ab, out.log_tail);
    have_a = true;
    ++out.hypergeometric_used;
  } catch (const ConvergenceError&) {
  }
  try {
    out.dlog_db = second_ratio_3f2(x, a, b, log_beta, psi_b, psi_ab, out.log_tail);
    have_b = true;
    ++out.hypergeometric_used;
  } catch (const ConvergenceError&) {
  }
  if (!have_a || !have_b) {
    const BetaTailDerivs d = reg_inc_beta_shape_derivs(x, a, b);
    if (!have_a) out.dlog_da = d.dlower_dp;
    if (!have_b) out.dlog_db = d.dlower_dq;
  }
  return out;
}

XBTerm xb_term(double y, double u, const ShapeCache& s, bool with_gradient) {
  XBTerm t{};
  const double scale = 1.0 + 2.0 * u;
  if (y == 0.0 || y == 1.0) {
    const double z0 = u / scale;
    // Mass at 0 is I_{z0}(p, q); mass at 1 is I_{z0}(q, p).
    const bool at_zero = y == 0.0;
    const double a = at_zero ? s.p : s.q;
    const double b = at_zero ? s.q : s.p;
    if (!with_gradient) {
      t.loglik = reg_inc_beta_tails(z0, a, b, s.log_beta).log_lower;
      return t;
    }
    const TailLogDerivs d = lower_tail_log_derivs(z0, a, b, s.log_beta, at_zero ? s.psi_p : s.psi_q,
                                                  at_zero ? s.psi_q : s.psi_p, s.psi_phi);
    t.loglik = d.log_tail;
    const double dlog_dp = at_zero ? d.dlog_da : d.dlog_db;
    const double dlog_dq = at_zero ? d.dlog_db : d.dlog_da;
    t.d_mu = s.phi * (dlog_dp - dlog_dq);
    t.d_phi = s.mu * dlog_dp + (1.0 - s.mu) * dlog_dq;
    // The density of the B4 variable at the censoring point, divided by the mass.
    const double log_f = beta_log_density(z0, (1.0 + u) / scale, a, b, s.log_beta);
    t.d_u = std::exp(log_f - d.log_tail) / (scale * scale);
    return t;
  }
  const double w = (y + u) / scale;
  const double w1 = (1.0 - y + u) / scale;
  t.loglik = beta_log_density(w, w1, s.p, s.q, s.log_beta) - std::log1p(2.0 * u);
  if (!with_gradient) return t;
  const double tbar = std::log(w) - s.psi_p + s.psi_phi;
  const double ubar = std::log(w1) - s.psi_q + s.psi_phi;
  t.d_mu = s.phi * (tbar - ubar);
  t.d_phi = s.mu * (tbar - ubar) + ubar;
  t.d_u = (s.p - 1.0) / (y + u) + (s.q - 1.0) / (1.0 - y + u) - 2.0 * (s.phi - 1.0) / scale;
  return t;
}

}  // namespace xbx
