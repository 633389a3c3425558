#include "xbx/infer.hpp"

#include <algorithm>
#include <cmath>

#include "xbx/errors.hpp"
#include "xbx/special.hpp"

namespace xbx {

namespace {

constexpr double kLrNoise = 1e-4;

bool subset(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  return std::all_of(small.begin(), small.end(),
                     [&](const std::string& s) { return std::find(big.begin(), big.end(), s) != big.end(); });
}

TestResult chi2_result(double statistic, int df) {
  return {statistic, df, chi2_upper_tail(statistic, df), false};
}

}  // namespace

LinearHypothesis zero_hypothesis(const FitResult& fit, const std::vector<std::string>& names) {
  if (names.empty()) throw DomainError("zero_hypothesis: no coefficients named");
  const std::vector<std::string> all = fit.coefficient_names();
  LinearHypothesis h;
  h.R = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(names.size()), static_cast<Eigen::Index>(all.size()));
  h.b = Eigen::VectorXd::Zero(h.R.rows());
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto it = std::find(all.begin(), all.end(), names[k]);
    if (it == all.end()) throw DomainError("zero_hypothesis: unknown coefficient '" + names[k] + "'");
    h.R(static_cast<Eigen::Index>(k), it - all.begin()) = 1.0;
  }
  return h;
}

TestResult wald_test(const FitResult& fit, const LinearHypothesis& hyp) {
  if (!fit.vcov) throw DomainError("wald_test: fit has no covariance matrix");
  const Eigen::Index pq = fit.theta_hat.beta.size() + fit.theta_hat.gamma.size();
  const Eigen::Index full = fit.theta_hat.size();
  if (hyp.R.rows() < 1 || hyp.b.size() != hyp.R.rows()) throw ShapeError("wald_test: R and b disagree");
  if (hyp.R.cols() != pq && hyp.R.cols() != full) {
    throw ShapeError("wald_test: R needs " + std::to_string(pq) + " columns");
  }
  const Eigen::Index k = fit.vcov->rows();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(hyp.R.rows(), k);
  R.leftCols(pq) = hyp.R.leftCols(pq);
  if (hyp.R.cols() == full && full > pq) {
    if (k > pq) {
      R.col(pq) = hyp.R.col(pq);
    } else if (hyp.R.col(pq).any()) {
      throw DomainError("wald_test: log(nu) was not estimated");
    }
  }
  const Eigen::VectorXd theta = fit.theta_hat.flat().head(k);
  const Eigen::VectorXd diff = R * theta - hyp.b;
  const Eigen::MatrixXd middle = R * (*fit.vcov) * R.transpose();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(middle);
  if (lu.rank() < middle.rows()) throw DomainError("wald_test: R V R' is singular");
  const double stat = diff.dot(lu.solve(diff));
  return chi2_result(std::max(stat, 0.0), static_cast<int>(R.rows()));
}

TestResult lr_test(const FitResult& full, const FitResult& restricted) {
  if (full.spec.family != restricted.spec.family || !(full.spec.mean_link == restricted.spec.mean_link) ||
      !(full.spec.precision_link == restricted.spec.precision_link)) {
    throw DomainError("lr_test: models differ in family or links");
  }
  if (full.n != restricted.n) throw DomainError("lr_test: fits use different numbers of observations");
  if (!subset(restricted.x_names, full.x_names) || !subset(restricted.z_names, full.z_names)) {
    throw DomainError("lr_test: restricted design columns are not a subset of the full ones");
  }
  if (full.xi_fixed && !restricted.xi_fixed) throw DomainError("lr_test: full model holds nu fixed");
  const Eigen::Index df = full.dim() - restricted.dim();
  if (df < 1) throw DomainError("lr_test: restricted model has no fewer parameters");
  double stat = 2.0 * (full.loglik - restricted.loglik);
  bool suspect = false;
  if (stat < 0.0) {
    suspect = stat < -kLrNoise;
    stat = 0.0;
  }
  TestResult out = chi2_result(stat, static_cast<int>(df));
  out.suspect = suspect;
  return out;
}

InformationCriteria information_criteria(double loglik, Eigen::Index k, Eigen::Index n) {
  const double kk = static_cast<double>(k);
  return {-2.0 * loglik + 2.0 * kk, -2.0 * loglik + kk * std::log(static_cast<double>(n))};
}

InformationCriteria information_criteria(const FitResult& fit) {
  return information_criteria(fit.loglik, fit.dim(), fit.n);
}

}  // namespace xbx
