#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace xbx {

struct OptimOptions {
  int max_iterations = 1000;
  /// Converged when max |gradient| <= grad_tol * (1 + |objective|).
  double grad_tol = 1e-6;
  /// Steps with max-norm below this are treated as a stall.
  double step_tol = 1e-9;
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/// Objective and gradient at x. May throw EvaluationError to reject a point.
using ObjectiveWithGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// BFGS maximization with backtracking (Armijo) line search.
OptimResult maximize_bfgs(const ObjectiveWithGradient& f, const Eigen::VectorXd& x0,
                          const OptimOptions& options = {});

}  // namespace xbx
