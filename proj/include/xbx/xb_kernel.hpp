#pragma once

#include "xbx/special.hpp"

namespace xbx {

/// Per-observation constants of Beta(mu * phi, (1 - mu) * phi) shared by all
/// quadrature nodes.
struct ShapeCache {
  double mu;
  double phi;
  double p;
  double q;
  double log_beta;
  double psi_p;
  double psi_q;
  double psi_phi;
};

ShapeCache make_shape_cache(double mu, double phi);

/// Auxiliary functions for the shape derivatives of F_B(z | mu, phi):
///   h(z)  = z^p / (p^2 B(p, q)) 3F2(p, p, 1 - q; p + 1, p + 1; z)
///   q(z)  = dF_B(z)/dp = F_B(z) {psi(phi) - psi(p) + log z} - h(z)
///   r(z)  = dF_B(z)/dq = -q(1 - z | 1 - mu, phi)
/// Throws ConvergenceError when a 3F2 series does not converge.
struct QRH {
  double q;
  double r;
  double h;
};
QRH qrh_functions(double z, double mu, double phi, const SeriesControl& ctrl = {});

/// h(z | mu, phi) alone; needs only the series at z.
double h_function(double z, double mu, double phi, const SeriesControl& ctrl = {});

/// Log-derivatives of a lower tail T = I_x(a, b) with respect to both shapes.
struct TailLogDerivs {
  double log_tail;
  double dlog_da;
  double dlog_db;
  int hypergeometric_used;  // 0, 1 or 2 derivatives obtained from 3F2
};

/// Tries the 3F2 representation for each shape derivative and falls back to a
/// positive-term series when the 3F2 sum fails to converge or cancels too much.
TailLogDerivs lower_tail_log_derivs(double x, double a, double b, double log_beta,
                                    double psi_a, double psi_b, double psi_ab);

/// One XB likelihood contribution log L(y | mu, phi, u) and its derivatives in
/// mu, phi and u. Requires u > 0 when y is 0 or 1.
struct XBTerm {
  double loglik;
  double d_mu;
  double d_phi;
  double d_u;
};
XBTerm xb_term(double y, double u, const ShapeCache& s, bool with_gradient);

}  // namespace xbx
