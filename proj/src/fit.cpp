#include "xbx/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "xbx/errors.hpp"

namespace xbx {

namespace {

Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  return A.colPivHouseholderQr().solve(b);
}

bool normal_family(Family f) { return f == Family::Normal || f == Family::CensoredNormal; }

// Rows sorted lexicographically by (y, X row, Z row). Fitting the sorted data
// makes every floating-point reduction independent of the input row order.
std::vector<Eigen::Index> canonical_order(const Dataset& d) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d.n()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    if (d.y(a) != d.y(b)) return d.y(a) < d.y(b);
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
      if (d.X(a, j) != d.X(b, j)) return d.X(a, j) < d.X(b, j);
    }
    for (Eigen::Index j = 0; j < d.Z.cols(); ++j) {
      if (d.Z(a, j) != d.Z(b, j)) return d.Z(a, j) < d.Z(b, j);
    }
    return false;
  };
  std::stable_sort(idx.begin(), idx.end(), less);
  return idx;
}

}  // namespace

ParameterVector start_values(const ModelSpec& spec_in, const Dataset& data) {
  const ModelSpec spec = resolve_spec(spec_in, data);
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.X.cols();
  ParameterVector pv;
  if (normal_family(spec.family)) {
    Eigen::VectorXd target = data.y.unaryExpr([&](double v) { return spec.mean_link.link(v); });
    if (!target.allFinite()) target = data.y;
    pv.beta = least_squares(data.X, target);
    const Eigen::VectorXd resid = data.y - data.X * pv.beta;
    const double dof = static_cast<double>(std::max<Eigen::Index>(1, n - p));
    const double sigma = std::max(1e-3, std::sqrt(resid.squaredNorm() / dof));
    pv.gamma = least_squares(data.Z, Eigen::VectorXd::Constant(n, spec.precision_link.link(sigma)));
    return pv;
  }
  const double lo = 0.5 / static_cast<double>(n);
  const Eigen::VectorXd yc = data.y.unaryExpr([&](double v) { return std::clamp(v, lo, 1.0 - lo); });
  const Eigen::VectorXd target = yc.unaryExpr([&](double v) { return spec.mean_link.link(v); });
  pv.beta = least_squares(data.X, target);
  const Eigen::VectorXd eta = data.X * pv.beta;
  const Eigen::VectorXd resid = target - eta;
  const double s2 = resid.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, n - p));
  double phi_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = std::clamp(spec.mean_link.inverse(eta(i)), 1e-6, 1.0 - 1e-6);
    const double dmu = spec.mean_link.inverse_derivative(eta(i));
    const double var = s2 * dmu * dmu;
    phi_sum += var > 0.0 ? mu * (1.0 - mu) / var - 1.0 : 1.0;
  }
  double phi0 = phi_sum / static_cast<double>(n);
  if (!(phi0 > 0.0) || !std::isfinite(phi0)) phi0 = 1.0;
  phi0 = std::clamp(phi0, 1e-2, 1e6);
  pv.gamma = least_squares(data.Z, Eigen::VectorXd::Constant(n, spec.precision_link.link(phi0)));
  if (spec.has_xi()) pv.xi = std::log(0.1);
  return pv;
}

Eigen::MatrixXd numerical_hessian(const LogLikelihood& ll, const Eigen::VectorXd& theta) {
  const Eigen::Index k = theta.size();
  Eigen::MatrixXd H(k, k);
  Eigen::VectorXd gp, gm;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double h = 1e-5 * (1.0 + std::abs(theta(j)));
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    ll.value_and_gradient(tp, gp);
    ll.value_and_gradient(tm, gm);
    H.col(j) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

FitResult fit(const ModelSpec& spec_in, const Dataset& data, const FitOptions& options) {
  const ModelSpec spec = resolve_spec(spec_in, data);
  spec.validate();
  const bool free_xi = spec.has_xi() && !options.fixed_xi;
  data.validate(free_xi ? 1 : 0);

  const Dataset sorted = data.permuted(canonical_order(data));
  LogLikelihood ll(spec, sorted, options.fixed_xi);
  ll.set_threads(options.threads);

  ParameterVector start = options.start ? *options.start : start_values(spec, sorted);
  if (options.fixed_xi) start.xi = options.fixed_xi;
  if (spec.has_xi() && !start.xi) start.xi = std::log(0.1);
  const Eigen::VectorXd x0 = ll.pack(start);

  const ObjectiveWithGradient objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    return ll.value_and_gradient(x, g);
  };
  OptimResult opt;
  try {
    opt = maximize_bfgs(objective, x0, options.optim);
  } catch (const EvaluationError& e) {
    throw FitError(std::string("cannot evaluate the likelihood at the starting values: ") + e.what());
  }
  if (!opt.converged) {
    std::ostringstream msg;
    msg << family_name(spec.family) << " fit did not converge (" << opt.message << ") after "
        << opt.iterations << " iterations; loglik " << opt.value << ", max |gradient| "
        << opt.gradient.lpNorm<Eigen::Infinity>();
    throw FitError(msg.str());
  }

  FitResult r;
  r.spec = spec;
  r.theta_hat = ll.unpack(opt.x);
  r.xi_fixed = options.fixed_xi.has_value();
  r.loglik = opt.value;
  r.converged = true;
  r.iterations = opt.iterations;
  r.gradient_norm = opt.gradient.lpNorm<Eigen::Infinity>();
  r.n = data.n();
  r.x_names = data.x_names;
  r.z_names = data.z_names;
  const double k = static_cast<double>(r.dim());
  r.aic = -2.0 * r.loglik + 2.0 * k;
  r.bic = -2.0 * r.loglik + std::log(static_cast<double>(r.n)) * k;
  if (r.theta_hat.xi) r.nu = std::exp(*r.theta_hat.xi);

  const LinearPredictors lp = linear_predictors(spec, data, r.theta_hat);
  r.fitted_mu = lp.mu;
  r.fitted_phi = lp.phi;

  if (options.compute_vcov) {
    try {
      const Eigen::MatrixXd info = -numerical_hessian(ll, opt.x);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
      const bool pd = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                      (ldlt.vectorD().array() > 1e-12 * info.diagonal().cwiseAbs().maxCoeff()).all();
      if (pd) {
        Eigen::MatrixXd v = ldlt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
        r.vcov = 0.5 * (v + v.transpose());
      } else {
        r.warnings.push_back("singular hessian: covariance matrix unavailable");
      }
    } catch (const EvaluationError& e) {
      r.warnings.push_back(std::string("hessian evaluation failed: ") + e.what());
    }
  }
  return r;
}

std::unique_ptr<MixedDistribution> make_distribution(const ModelSpec& spec, double mu, double phi,
                                                     std::optional<double> nu) {
  switch (spec.family) {
    case Family::Normal: return std::make_unique<NormalDistribution>(CensNormParams{mu, phi});
    case Family::CensoredNormal:
      return std::make_unique<CensoredNormalDistribution>(CensNormParams{mu, phi});
    case Family::BetaRescaled: {
      if (!spec.rescale_u) throw DomainError("BetaRescaled distribution needs rescale_u");
      return std::make_unique<XBDistribution>(XBParams{mu, phi, *spec.rescale_u});
    }
    case Family::XBFixed: return std::make_unique<XBDistribution>(XBParams{mu, phi, spec.fixed_u});
    case Family::XBX: {
      if (!nu) throw DomainError("XBX distribution needs nu");
      return std::make_unique<XBXDistribution>(XBXParams{mu, phi, *nu}, laguerre_rule(spec.quad_order));
    }
  }
  throw DomainError("unknown family");
}

std::vector<std::unique_ptr<MixedDistribution>> fitted_distributions(const FitResult& f,
                                                                     const Dataset& data) {
  const LinearPredictors lp = linear_predictors(f.spec, data, f.theta_hat);
  std::vector<std::unique_ptr<MixedDistribution>> out;
  out.reserve(static_cast<std::size_t>(data.n()));
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out.push_back(make_distribution(f.spec, lp.mu(i), lp.phi(i), f.nu));
  }
  return out;
}

PredictionTable predict(const FitResult& f, const Dataset& newdata, const PredictionTargets& targets) {
  if (newdata.X.cols() != f.theta_hat.beta.size() || newdata.Z.cols() != f.theta_hat.gamma.size()) {
    throw ShapeError("new data columns do not match the fitted model");
  }
  if (newdata.X.rows() != newdata.Z.rows()) throw ShapeError("design row counts differ");
  const bool normal = normal_family(f.spec.family);
  PredictionTable t;
  if (targets.mean) t.columns.push_back("mean");
  if (targets.params) {
    t.columns.push_back("mu");
    t.columns.push_back(normal ? "sigma" : "phi");
    if (f.nu) t.columns.push_back("nu");
  }
  auto label = [](const char* prefix, double v) {
    std::ostringstream os;
    os << prefix << "(" << v << ")";
    return os.str();
  };
  for (double v : targets.p_above) t.columns.push_back(label("p_above", v));
  for (double v : targets.p_below) t.columns.push_back(label("p_below", v));
  for (double v : targets.cdf_at) t.columns.push_back(label("cdf_at", v));

  const Eigen::Index rows = newdata.X.rows();
  t.values.resize(rows, static_cast<Eigen::Index>(t.columns.size()));
  Dataset shaped = newdata;
  if (shaped.y.size() != rows) shaped.y = Eigen::VectorXd::Zero(rows);
  const LinearPredictors lp = linear_predictors(f.spec, shaped, f.theta_hat);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto d = make_distribution(f.spec, lp.mu(i), lp.phi(i), f.nu);
    Eigen::Index c = 0;
    if (targets.mean) t.values(i, c++) = d->mean();
    if (targets.params) {
      t.values(i, c++) = lp.mu(i);
      t.values(i, c++) = lp.phi(i);
      if (f.nu) t.values(i, c++) = *f.nu;
    }
    for (double v : targets.p_above) t.values(i, c++) = v >= 1.0 ? 0.0 : (v < 0.0 ? 1.0 : d->prob_above(v));
    for (double v : targets.p_below) {
      double pb;
      if (v <= 0.0) pb = 0.0;
      else if (v >= 1.0) pb = v > 1.0 ? 1.0 : 1.0 - d->mass_at_one();
      else pb = d->cdf(v);
      t.values(i, c++) = pb;
    }
    for (double v : targets.cdf_at) t.values(i, c++) = v < 0.0 ? 0.0 : (v >= 1.0 ? 1.0 : d->cdf(v));
  }
  return t;
}

}  // namespace xbx
