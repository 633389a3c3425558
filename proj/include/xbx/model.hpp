#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "xbx/link.hpp"

namespace xbx {

enum class Family { Normal, CensoredNormal, BetaRescaled, XBFixed, XBX };

std::string family_name(Family f);
Family parse_family(const std::string& name);

/// Response in [0, 1] with mean design X and precision design Z.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;

  Eigen::Index n() const { return y.size(); }
  /// Throws ShapeError on inconsistent dimensions and DataError on non-finite
  /// entries, responses outside [0, 1] or too few rows for `extra` additional
  /// parameters beyond the two designs.
  void validate(int extra = 0) const;
  /// Rows reordered so that row i of the result is row order[i] of this one.
  Dataset permuted(const std::vector<Eigen::Index>& order) const;
};

struct ModelSpec {
  Family family = Family::XBX;
  LinkFunction mean_link{LinkKind::Logit};
  LinkFunction precision_link{LinkKind::Log};
  int quad_order = 20;
  /// BetaRescaled only; defaults to 1 / (2 (n - 1)) when unset.
  std::optional<double> rescale_u;
  /// XBFixed only.
  double fixed_u = 0.0;

  /// Family defaults: identity/log links for Normal and CensoredNormal,
  /// logit/log otherwise.
  static ModelSpec defaults(Family family);
  bool has_xi() const { return family == Family::XBX; }
  void validate() const;
};

/// Coefficients of the mean model (beta), precision or scale model (gamma) and
/// the log exceedance xi = log nu (XBX only).
struct ParameterVector {
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  std::optional<double> xi;

  Eigen::Index size() const { return beta.size() + gamma.size() + (xi ? 1 : 0); }
  Eigen::VectorXd flat() const;
  static ParameterVector from_flat(const Eigen::VectorXd& theta, Eigen::Index p, Eigen::Index q,
                                   bool with_xi);
};

struct LinearPredictors {
  Eigen::VectorXd eta;
  Eigen::VectorXd zeta;
  Eigen::VectorXd mu;
  Eigen::VectorXd phi;  // precision, or sigma for the normal families
};

/// eta = X beta, zeta = Z gamma and their inverse links. Throws ShapeError on
/// dimension mismatch.
LinearPredictors linear_predictors(const ModelSpec& spec, const Dataset& data,
                                   const ParameterVector& theta);

struct FitResult {
  ModelSpec spec;
  ParameterVector theta_hat;
  std::optional<Eigen::MatrixXd> vcov;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  Eigen::Index n = 0;
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;
  Eigen::VectorXd fitted_mu;
  Eigen::VectorXd fitted_phi;
  std::optional<double> nu;
  /// xi was held fixed rather than estimated; vcov then omits it.
  bool xi_fixed = false;
  std::vector<std::string> warnings;

  /// Number of estimated parameters.
  Eigen::Index dim() const { return theta_hat.size() - (xi_fixed ? 1 : 0); }
  /// "mean:<x>", "precision:<z>" (or "scale:<z>"), "log(nu)".
  std::vector<std::string> coefficient_names() const;
  /// sqrt(diag(vcov)) over all coefficients, NaN where unavailable.
  Eigen::VectorXd standard_errors() const;
};

}  // namespace xbx
