#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xbx/dist.hpp"
#include "xbx/likelihood.hpp"
#include "xbx/model.hpp"
#include "xbx/optim.hpp"

namespace xbx {

struct FitOptions {
  OptimOptions optim;
  bool compute_vcov = true;
  /// XBX only: hold xi = log(nu) at this value.
  std::optional<double> fixed_xi;
  /// Overrides the default starting values.
  std::optional<ParameterVector> start;
  int threads = 1;
};

/// Default starting values: least squares on the link scale for the mean,
/// method-of-moments precision (or residual scale) and xi = log(0.1).
ParameterVector start_values(const ModelSpec& spec, const Dataset& data);

/// Maximum (approximate) likelihood fit. Throws FitError when the optimizer
/// does not converge. A singular Hessian leaves vcov empty and adds a warning.
FitResult fit(const ModelSpec& spec, const Dataset& data, const FitOptions& options = {});

/// Central differences of the analytic gradient with h_j = 1e-5 (1 + |theta_j|),
/// symmetrized.
Eigen::MatrixXd numerical_hessian(const LogLikelihood& ll, const Eigen::VectorXd& theta);

/// Distribution of a single response under the family with the given
/// parameters (phi is sigma for the normal families).
std::unique_ptr<MixedDistribution> make_distribution(const ModelSpec& spec, double mu, double phi,
                                                     std::optional<double> nu);

/// One fitted distribution per row of `data` (which must match the fit's designs).
std::vector<std::unique_ptr<MixedDistribution>> fitted_distributions(const FitResult& fit,
                                                                     const Dataset& data);

struct PredictionTargets {
  bool mean = true;
  bool params = false;
  std::vector<double> p_above;
  std::vector<double> p_below;
  std::vector<double> cdf_at;
};

struct PredictionTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // one row per observation
};

/// Throws ShapeError when the design columns do not match the fit.
PredictionTable predict(const FitResult& fit, const Dataset& newdata, const PredictionTargets& targets);

}  // namespace xbx
