#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "xbx/model.hpp"

namespace xbx {

/// Linear hypothesis R theta = b. R has one column per mean and precision
/// coefficient; a trailing column for log(nu) is accepted and must be zero
/// if the fit held nu fixed.
struct LinearHypothesis {
  Eigen::MatrixXd R;
  Eigen::VectorXd b;
};

/// Hypothesis that the named coefficients are zero. Names follow
/// FitResult::coefficient_names(). Throws DomainError for unknown names.
LinearHypothesis zero_hypothesis(const FitResult& fit, const std::vector<std::string>& names);

struct TestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  /// Set by lr_test when the restricted fit beat the full fit by more than 1e-4.
  bool suspect = false;
};

/// (R theta - b)' (R V R')^{-1} (R theta - b) with V the fitted covariance.
/// Throws DomainError for a singular R V R' or a fit without covariance.
TestResult wald_test(const FitResult& fit, const LinearHypothesis& hyp);

/// 2 (loglik_full - loglik_restricted). Throws DomainError unless the
/// restricted fit is nested in the full one.
TestResult lr_test(const FitResult& full, const FitResult& restricted);

struct InformationCriteria {
  double aic;
  double bic;
};

/// k counts every estimated parameter, including log(nu).
InformationCriteria information_criteria(double loglik, Eigen::Index k, Eigen::Index n);
InformationCriteria information_criteria(const FitResult& fit);

}  // namespace xbx
