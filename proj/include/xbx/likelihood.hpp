#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "xbx/model.hpp"
#include "xbx/quad.hpp"

namespace xbx {

/// Overflow guard: precision (or scale) beyond this value rejects the step.
inline constexpr double kMaxPrecision = 1e8;

/// Log-likelihood of one model specification on one dataset, as a function of
/// the flat unconstrained parameter vector (beta, gamma[, xi]).
///
/// Observations are processed in fixed chunks and reduced in order, so the
/// result does not depend on the number of worker threads.
class LogLikelihood {
 public:
  /// `fixed_xi` pins xi for XBX; the parameter vector then excludes it.
  LogLikelihood(ModelSpec spec, const Dataset& data, std::optional<double> fixed_xi = std::nullopt,
                std::shared_ptr<const QuadratureRule> rule = nullptr);

  Eigen::Index dim() const;
  const ModelSpec& spec() const { return spec_; }
  const Dataset& data() const { return data_; }
  void set_threads(int threads) { threads_ = threads < 1 ? 1 : threads; }

  /// Throws EvaluationError outside the admissible region or on non-finite
  /// intermediate values.
  double value(const Eigen::VectorXd& theta) const;
  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const;

  ParameterVector unpack(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd pack(const ParameterVector& theta) const;

 private:
  struct RowOutput {
    double loglik;
    double d_mu;
    double d_phi;
    double d_xi;
  };
  double evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;
  RowOutput row(Eigen::Index i, double mu, double phi, double nu, bool with_gradient) const;

  ModelSpec spec_;
  Dataset data_;
  std::optional<double> fixed_xi_;
  std::shared_ptr<const QuadratureRule> rule_;
  int threads_ = 1;
};

/// Fills in data-dependent defaults (BetaRescaled rescale_u = 1 / (2 (n - 1))).
ModelSpec resolve_spec(const ModelSpec& spec, const Dataset& data);

double loglik_xbx(const ParameterVector& theta, const Dataset& data, const QuadratureRule& rule,
                  const ModelSpec& spec = ModelSpec::defaults(Family::XBX));
Eigen::VectorXd score_xbx(const ParameterVector& theta, const Dataset& data,
                          const QuadratureRule& rule,
                          const ModelSpec& spec = ModelSpec::defaults(Family::XBX));

/// Exact log-likelihood for the Normal, CensoredNormal, BetaRescaled and
/// XBFixed families.
double loglik_family(const ModelSpec& spec, const ParameterVector& theta, const Dataset& data);
Eigen::VectorXd score_family(const ModelSpec& spec, const ParameterVector& theta,
                             const Dataset& data);

}  // namespace xbx
