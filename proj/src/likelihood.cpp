#include "xbx/likelihood.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "xbx/errors.hpp"
#include "xbx/special.hpp"
#include "xbx/xb_kernel.hpp"

namespace xbx {

namespace {

constexpr Eigen::Index kChunk = 256;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw EvaluationError(std::string("non-finite ") + what);
}

}  // namespace

ModelSpec resolve_spec(const ModelSpec& spec, const Dataset& data) {
  ModelSpec out = spec;
  if (out.family == Family::BetaRescaled && !out.rescale_u) {
    if (data.n() < 2) throw DataError("BetaRescaled needs at least two observations");
    out.rescale_u = 1.0 / (2.0 * static_cast<double>(data.n() - 1));
  }
  return out;
}

LogLikelihood::LogLikelihood(ModelSpec spec, const Dataset& data, std::optional<double> fixed_xi,
                             std::shared_ptr<const QuadratureRule> rule)
    : spec_(resolve_spec(spec, data)), data_(data), fixed_xi_(fixed_xi), rule_(std::move(rule)) {
  spec_.validate();
  if (spec_.family == Family::XBX && !rule_) rule_ = laguerre_rule(spec_.quad_order);
  if (fixed_xi_ && spec_.family != Family::XBX) {
    throw DomainError("a fixed xi only applies to the XBX family");
  }
  if (fixed_xi_ && !std::isfinite(*fixed_xi_)) throw DomainError("fixed xi must be finite");
  if (spec_.family == Family::XBFixed && spec_.fixed_u == 0.0) {
    for (Eigen::Index i = 0; i < data_.n(); ++i) {
      if (data_.y(i) == 0.0 || data_.y(i) == 1.0) {
        throw DomainError("XBFixed with u = 0 has no mass at the boundary responses");
      }
    }
  }
}

Eigen::Index LogLikelihood::dim() const {
  return data_.X.cols() + data_.Z.cols() + (spec_.has_xi() && !fixed_xi_ ? 1 : 0);
}

ParameterVector LogLikelihood::unpack(const Eigen::VectorXd& theta) const {
  if (theta.size() != dim()) {
    throw ShapeError("parameter vector has length " + std::to_string(theta.size()) + ", expected " +
                     std::to_string(dim()));
  }
  ParameterVector pv =
      ParameterVector::from_flat(theta, data_.X.cols(), data_.Z.cols(), spec_.has_xi() && !fixed_xi_);
  if (fixed_xi_) pv.xi = fixed_xi_;
  return pv;
}

Eigen::VectorXd LogLikelihood::pack(const ParameterVector& theta) const {
  Eigen::VectorXd flat(dim());
  flat << theta.beta, theta.gamma, Eigen::VectorXd::Constant(dim() - theta.beta.size() - theta.gamma.size(),
                                                            theta.xi.value_or(0.0));
  return flat;
}

double LogLikelihood::value(const Eigen::VectorXd& theta) const { return evaluate(theta, nullptr); }

double LogLikelihood::value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  return evaluate(theta, &grad);
}

LogLikelihood::RowOutput LogLikelihood::row(Eigen::Index i, double mu, double phi, double nu,
                                            bool with_gradient) const {
  const double y = data_.y(i);
  RowOutput out{0.0, 0.0, 0.0, 0.0};
  switch (spec_.family) {
    case Family::Normal: {
      const double t = (y - mu) / phi;
      out.loglik = -0.5 * t * t - std::log(phi) - kHalfLog2Pi;
      out.d_mu = t / phi;
      out.d_phi = (t * t - 1.0) / phi;
      return out;
    }
    case Family::CensoredNormal: {
      if (y == 0.0 || y == 1.0) {
        // log Phi(a) with a = -mu/sigma at 0 and a = (mu - 1)/sigma at 1.
        const double a = y == 0.0 ? -mu / phi : (mu - 1.0) / phi;
        const double log_cdf = log_std_normal_cdf(a);
        const double mills = std::exp(-0.5 * a * a - kHalfLog2Pi - log_cdf);
        out.loglik = log_cdf;
        out.d_mu = (y == 0.0 ? -mills : mills) / phi;
        out.d_phi = -mills * a / phi;
        return out;
      }
      const double t = (y - mu) / phi;
      out.loglik = -0.5 * t * t - std::log(phi) - kHalfLog2Pi;
      out.d_mu = t / phi;
      out.d_phi = (t * t - 1.0) / phi;
      return out;
    }
    case Family::BetaRescaled: {
      const double u = *spec_.rescale_u;
      const ShapeCache s = make_shape_cache(mu, phi);
      const double scale = 1.0 + 2.0 * u;
      const double w = (y + u) / scale;
      const double w1 = (1.0 - y + u) / scale;
      out.loglik = beta_log_density(w, w1, s.p, s.q, s.log_beta) - std::log1p(2.0 * u);
      if (with_gradient) {
        const double tbar = std::log(w) - s.psi_p + s.psi_phi;
        const double ubar = std::log(w1) - s.psi_q + s.psi_phi;
        out.d_mu = phi * (tbar - ubar);
        out.d_phi = mu * (tbar - ubar) + ubar;
      }
      return out;
    }
    case Family::XBFixed: {
      const XBTerm t = xb_term(y, spec_.fixed_u, make_shape_cache(mu, phi), with_gradient);
      out.loglik = t.loglik;
      out.d_mu = t.d_mu;
      out.d_phi = t.d_phi;
      return out;
    }
    case Family::XBX: {
      const ShapeCache s = make_shape_cache(mu, phi);
      const QuadratureRule& rule = *rule_;
      double terms[kMaxLaguerreOrder];
      XBTerm node_terms[kMaxLaguerreOrder];
      double top = -std::numeric_limits<double>::infinity();
      for (int t = 0; t < rule.order; ++t) {
        if (rule.log_weights[t] == -std::numeric_limits<double>::infinity()) {
          terms[t] = -std::numeric_limits<double>::infinity();
          continue;
        }
        const double u = nu * rule.nodes[t];
        node_terms[t] = xb_term(y, u, s, with_gradient);
        terms[t] = rule.log_weights[t] + node_terms[t].loglik;
        if (terms[t] > top) top = terms[t];
      }
      if (!std::isfinite(top)) throw EvaluationError("XBX contribution underflowed");
      double total = 0.0;
      for (int t = 0; t < rule.order; ++t) total += std::exp(terms[t] - top);
      out.loglik = top + std::log(total);
      if (with_gradient) {
        for (int t = 0; t < rule.order; ++t) {
          if (terms[t] == -std::numeric_limits<double>::infinity()) continue;
          const double w = std::exp(terms[t] - out.loglik);
          out.d_mu += w * node_terms[t].d_mu;
          out.d_phi += w * node_terms[t].d_phi;
          out.d_xi += w * node_terms[t].d_u * nu * rule.nodes[t];
        }
      }
      return out;
    }
  }
  return out;
}

double LogLikelihood::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
  const ParameterVector pv = unpack(theta);
  for (Eigen::Index j = 0; j < theta.size(); ++j) require_finite(theta(j), "parameter");
  const Eigen::Index n = data_.n();
  const Eigen::VectorXd eta = data_.X * pv.beta;
  const Eigen::VectorXd zeta = data_.Z * pv.gamma;
  const bool beta_family = spec_.family != Family::Normal && spec_.family != Family::CensoredNormal;
  double nu = 0.0;
  if (spec_.family == Family::XBX) {
    nu = std::exp(*pv.xi);
    if (!(nu > 0.0) || !std::isfinite(nu)) throw EvaluationError("exceedance parameter out of range");
  }
  const bool with_gradient = grad != nullptr;

  std::vector<RowOutput> rows(static_cast<std::size_t>(n));
  Eigen::VectorXd d1(n), d2(n);
  auto run_rows = [&](Eigen::Index lo, Eigen::Index hi) {
    for (Eigen::Index i = lo; i < hi; ++i) {
      const double mu = spec_.mean_link.inverse(eta(i));
      const double phi = spec_.precision_link.inverse(zeta(i));
      if (!std::isfinite(mu) || !(phi > 0.0) || !(phi <= kMaxPrecision)) {
        throw EvaluationError("linear predictor outside the admissible region");
      }
      if (beta_family && !(mu > 0.0 && mu < 1.0)) throw EvaluationError("mean outside (0, 1)");
      rows[static_cast<std::size_t>(i)] = row(i, mu, phi, nu, with_gradient);
      if (with_gradient) {
        d1(i) = spec_.mean_link.inverse_derivative(eta(i));
        d2(i) = spec_.precision_link.inverse_derivative(zeta(i));
      }
    }
  };

  const Eigen::Index chunks = (n + kChunk - 1) / kChunk;
  if (threads_ <= 1 || chunks <= 1) {
    run_rows(0, n);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads_));
    std::vector<std::thread> pool;
    for (int w = 0; w < threads_; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (Eigen::Index c = w; c < chunks; c += threads_) {
            run_rows(c * kChunk, std::min(n, (c + 1) * kChunk));
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  double total = 0.0;
  for (Eigen::Index c = 0; c < chunks; ++c) {
    double partial = 0.0;
    for (Eigen::Index i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
      partial += rows[static_cast<std::size_t>(i)].loglik;
    }
    total += partial;
  }
  require_finite(total, "log-likelihood");

  if (with_gradient) {
    Eigen::VectorXd gm(n), gp(n);
    double gxi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const RowOutput& r = rows[static_cast<std::size_t>(i)];
      gm(i) = r.d_mu * d1(i);
      gp(i) = r.d_phi * d2(i);
      gxi += r.d_xi;
    }
    grad->resize(dim());
    grad->head(data_.X.cols()) = data_.X.transpose() * gm;
    grad->segment(data_.X.cols(), data_.Z.cols()) = data_.Z.transpose() * gp;
    if (dim() > data_.X.cols() + data_.Z.cols()) (*grad)(dim() - 1) = gxi;
    for (Eigen::Index j = 0; j < grad->size(); ++j) require_finite((*grad)(j), "gradient");
  }
  return total;
}

double loglik_xbx(const ParameterVector& theta, const Dataset& data, const QuadratureRule& rule,
                  const ModelSpec& spec) {
  if (spec.family != Family::XBX) throw DomainError("loglik_xbx requires the XBX family");
  LogLikelihood ll(spec, data, std::nullopt, std::make_shared<QuadratureRule>(rule));
  return ll.value(ll.pack(theta));
}

Eigen::VectorXd score_xbx(const ParameterVector& theta, const Dataset& data,
                          const QuadratureRule& rule, const ModelSpec& spec) {
  if (spec.family != Family::XBX) throw DomainError("score_xbx requires the XBX family");
  LogLikelihood ll(spec, data, std::nullopt, std::make_shared<QuadratureRule>(rule));
  Eigen::VectorXd g;
  ll.value_and_gradient(ll.pack(theta), g);
  return g;
}

double loglik_family(const ModelSpec& spec, const ParameterVector& theta, const Dataset& data) {
  if (spec.family == Family::XBX) throw DomainError("use loglik_xbx for the XBX family");
  LogLikelihood ll(spec, data);
  return ll.value(ll.pack(theta));
}

Eigen::VectorXd score_family(const ModelSpec& spec, const ParameterVector& theta,
                             const Dataset& data) {
  if (spec.family == Family::XBX) throw DomainError("use score_xbx for the XBX family");
  LogLikelihood ll(spec, data);
  Eigen::VectorXd g;
  ll.value_and_gradient(ll.pack(theta), g);
  return g;
}

}  // namespace xbx
