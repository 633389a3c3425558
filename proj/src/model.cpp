#include "xbx/model.hpp"

#include <cmath>
#include <limits>

#include "xbx/errors.hpp"
#include "xbx/quad.hpp"

namespace xbx {

std::string family_name(Family f) {
  switch (f) {
    case Family::Normal: return "normal";
    case Family::CensoredNormal: return "cn";
    case Family::BetaRescaled: return "beta";
    case Family::XBFixed: return "xb";
    case Family::XBX: return "xbx";
  }
  return "xbx";
}

Family parse_family(const std::string& name) {
  if (name == "normal" || name == "n") return Family::Normal;
  if (name == "cn" || name == "censored-normal") return Family::CensoredNormal;
  if (name == "beta" || name == "b") return Family::BetaRescaled;
  if (name == "xb") return Family::XBFixed;
  if (name == "xbx") return Family::XBX;
  throw DomainError("unknown family '" + name + "'");
}

void Dataset::validate(int extra) const {
  if (X.rows() != y.size() || Z.rows() != y.size()) {
    throw ShapeError("design matrices must have one row per response");
  }
  if (!x_names.empty() && static_cast<Eigen::Index>(x_names.size()) != X.cols()) {
    throw ShapeError("mean design names do not match its columns");
  }
  if (!z_names.empty() && static_cast<Eigen::Index>(z_names.size()) != Z.cols()) {
    throw ShapeError("precision design names do not match its columns");
  }
  if (y.size() < X.cols() + Z.cols() + extra + 1) {
    throw DataError("too few observations (" + std::to_string(y.size()) + ") for " +
                    std::to_string(X.cols() + Z.cols() + extra) + " parameters");
  }
  if (!X.allFinite() || !Z.allFinite()) throw DataError("design matrices contain non-finite entries");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(y(i) >= 0.0 && y(i) <= 1.0)) {
      throw DataError("response " + std::to_string(i + 1) + " outside [0, 1]");
    }
  }
}

Dataset Dataset::permuted(const std::vector<Eigen::Index>& order) const {
  if (static_cast<Eigen::Index>(order.size()) != n()) throw ShapeError("permutation length mismatch");
  Dataset out = *this;
  for (Eigen::Index i = 0; i < n(); ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.y(i) = y(src);
    out.X.row(i) = X.row(src);
    out.Z.row(i) = Z.row(src);
  }
  return out;
}

ModelSpec ModelSpec::defaults(Family family) {
  ModelSpec s;
  s.family = family;
  if (family == Family::Normal || family == Family::CensoredNormal) {
    s.mean_link = LinkFunction(LinkKind::Identity);
  }
  return s;
}

void ModelSpec::validate() const {
  const LinkKind pk = precision_link.kind();
  if (pk != LinkKind::Log && pk != LinkKind::Identity) {
    throw DomainError("precision link must be log or identity");
  }
  if (family == Family::XBX && (quad_order < 1 || quad_order > kMaxLaguerreOrder)) {
    throw DomainError("quadrature order must lie in [1, 256]");
  }
  if (rescale_u && !(*rescale_u > 0.0 && std::isfinite(*rescale_u))) {
    throw DomainError("rescale_u must be positive");
  }
  if (!(fixed_u >= 0.0) || !std::isfinite(fixed_u)) throw DomainError("fixed u must be nonnegative");
}

Eigen::VectorXd ParameterVector::flat() const {
  Eigen::VectorXd out(size());
  out.head(beta.size()) = beta;
  out.segment(beta.size(), gamma.size()) = gamma;
  if (xi) out(size() - 1) = *xi;
  return out;
}

ParameterVector ParameterVector::from_flat(const Eigen::VectorXd& theta, Eigen::Index p,
                                           Eigen::Index q, bool with_xi) {
  if (theta.size() != p + q + (with_xi ? 1 : 0)) throw ShapeError("parameter vector length mismatch");
  ParameterVector pv;
  pv.beta = theta.head(p);
  pv.gamma = theta.segment(p, q);
  if (with_xi) pv.xi = theta(p + q);
  return pv;
}

LinearPredictors linear_predictors(const ModelSpec& spec, const Dataset& data,
                                   const ParameterVector& theta) {
  if (theta.beta.size() != data.X.cols() || theta.gamma.size() != data.Z.cols()) {
    throw ShapeError("coefficient dimensions do not match the design");
  }
  if (data.X.rows() != data.Z.rows()) throw ShapeError("design row counts differ");
  LinearPredictors lp;
  lp.eta = data.X * theta.beta;
  lp.zeta = data.Z * theta.gamma;
  lp.mu = lp.eta.unaryExpr([&](double e) { return spec.mean_link.inverse(e); });
  lp.phi = lp.zeta.unaryExpr([&](double z) { return spec.precision_link.inverse(z); });
  return lp;
}

std::vector<std::string> FitResult::coefficient_names() const {
  const bool normal = spec.family == Family::Normal || spec.family == Family::CensoredNormal;
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < theta_hat.beta.size(); ++j) {
    out.push_back("mean:" + (j < static_cast<Eigen::Index>(x_names.size()) ? x_names[j] : "x" + std::to_string(j + 1)));
  }
  for (Eigen::Index j = 0; j < theta_hat.gamma.size(); ++j) {
    out.push_back((normal ? "scale:" : "precision:") +
                  (j < static_cast<Eigen::Index>(z_names.size()) ? z_names[j] : "z" + std::to_string(j + 1)));
  }
  if (theta_hat.xi) out.push_back("log(nu)");
  return out;
}

Eigen::VectorXd FitResult::standard_errors() const {
  Eigen::VectorXd se =
      Eigen::VectorXd::Constant(theta_hat.size(), std::numeric_limits<double>::quiet_NaN());
  if (!vcov) return se;
  for (Eigen::Index j = 0; j < vcov->rows(); ++j) {
    const double v = (*vcov)(j, j);
    if (v >= 0.0) se(j) = std::sqrt(v);
  }
  return se;
}

}  // namespace xbx
