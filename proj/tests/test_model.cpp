// Links, likelihood kernels, analytic gradients and fitting.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "xbx/errors.hpp"
#include "xbx/fit.hpp"
#include "xbx/likelihood.hpp"
#include "xbx/link.hpp"
#include "xbx/xb_kernel.hpp"

using namespace xbx;

namespace {

// ---------------------------------------------------------------- links

TEST(Link, RoundTripWhereRepresentable) {
  // Beyond the ranges below the inverse link rounds to exactly 0 or 1.
  struct Case {
    LinkKind kind;
    double lo, hi;
  };
  for (const Case c : {Case{LinkKind::Logit, -30, 30}, Case{LinkKind::Probit, -30, 8},
                       Case{LinkKind::Cloglog, -30, 3.5}, Case{LinkKind::Log, -30, 30},
                       Case{LinkKind::Identity, -30, 30}}) {
    const LinkFunction g(c.kind);
    for (double eta = c.lo; eta <= c.hi + 1e-12; eta += 0.25) {
      const double mu = g.inverse(eta);
      // Rounding mu costs eps * mu / (dmu/deta) on the eta scale.
      const double cond =
          c.kind == LinkKind::Log || c.kind == LinkKind::Identity ? 0.0 : 1.1e-16 * mu / g.inverse_derivative(eta);
      const double tol = std::max(1e-12, 4.0 * std::abs(cond)) + (c.kind == LinkKind::Log ? 1e-15 * std::abs(eta) : 0.0);
      EXPECT_NEAR(g.link(mu), eta, tol) << g.name() << " eta=" << eta;
    }
  }
}

TEST(Link, RoundTripToTwelveDigitsOnCentralRange) {
  for (LinkKind k : {LinkKind::Logit, LinkKind::Probit, LinkKind::Cloglog, LinkKind::Log, LinkKind::Identity}) {
    const LinkFunction g(k);
    for (double eta = -30.0; eta <= 2.0; eta += 0.5) EXPECT_NEAR(g.link(g.inverse(eta)), eta, 1e-12) << g.name();
  }
}

TEST(Link, DerivativeMatchesFiniteDifference) {
  for (LinkKind k : {LinkKind::Logit, LinkKind::Probit, LinkKind::Cloglog, LinkKind::Log, LinkKind::Identity}) {
    const LinkFunction g(k);
    for (double eta = -6.0; eta <= 3.0; eta += 0.75) {
      const double fd = oracle::central_diff([&](double e) { return g.inverse(e); }, eta, 1e-6);
      EXPECT_NEAR(g.inverse_derivative(eta), fd, 1e-6 * std::max(1.0, std::abs(fd))) << g.name();
    }
  }
}

TEST(Link, ParseNames) {
  for (const char* n : {"logit", "probit", "cloglog", "log", "identity"}) {
    EXPECT_EQ(LinkFunction::parse(n).name(), n);
  }
  EXPECT_THROW(LinkFunction::parse("cauchit"), DomainError);
}

// ---------------------------------------------------------------- q, r, h

TEST(QRH, QIsFirstShapeDerivative) {
  for (double z : {0.05, 0.3, 0.6}) {
    for (double mu : {0.3, 0.5, 0.8}) {
      for (double phi : {1.5, 6.0, 25.0}) {
        const double p = mu * phi, q = (1 - mu) * phi;
        const QRH v = qrh_functions(z, mu, phi);
        const double fd_p = oracle::central_diff([&](double s) { return oracle::ibeta(z, s, q); }, p, 1e-6 * p);
        const double fd_q = oracle::central_diff([&](double s) { return oracle::ibeta(z, p, s); }, q, 1e-6 * q);
        EXPECT_NEAR(v.q, fd_p, 1e-5) << z << " " << mu << " " << phi;
        EXPECT_NEAR(v.r, fd_q, 1e-5) << z << " " << mu << " " << phi;
      }
    }
  }
}

TEST(QRH, HVanishesAtZero) {
  EXPECT_LT(std::abs(h_function(1e-12, 0.5, 4.0)), 1e-20);
  EXPECT_LT(std::abs(h_function(1e-6, 0.3, 2.0)), std::abs(h_function(1e-3, 0.3, 2.0)));
  EXPECT_NEAR(h_function(0.3, 0.4, 5.0), qrh_functions(0.3, 0.4, 5.0).h, 1e-15);
}

TEST(QRH, ReflectionIdentity) {
  for (double z : {0.1, 0.4, 0.7}) {
    for (double mu : {0.2, 0.6}) {
      for (double phi : {2.0, 9.0}) {
        EXPECT_NEAR(qrh_functions(z, mu, phi).r, -qrh_functions(1.0 - z, 1.0 - mu, phi).q, 1e-14);
      }
    }
  }
}

TEST(QRH, ConvergenceErrorNearOne) {
  SeriesControl ctrl;
  ctrl.max_terms = 100;
  EXPECT_THROW(qrh_functions(0.9999, 0.5, 3.0, ctrl), ConvergenceError);
  EXPECT_THROW(qrh_functions(0.0, 0.5, 3.0), DomainError);
}

TEST(TailDerivatives, AgreeWithFiniteDifferencesOfLogIbeta) {
  int hyper = 0;
  for (double x : {0.01, 0.2, 0.33, 0.49}) {
    for (double a : {0.2, 1.0, 3.5, 40.0}) {
      for (double b : {0.3, 2.0, 60.0}) {
        const double lb = log_beta_fn(a, b);
        const TailLogDerivs d = lower_tail_log_derivs(x, a, b, lb, digamma(a), digamma(b), digamma(a + b));
        hyper += d.hypergeometric_used;
        auto logI_a = [&](double s) { return std::log(oracle::ibeta(x, s, b)); };
        auto logI_b = [&](double s) { return std::log(oracle::ibeta(x, a, s)); };
        const double fa = oracle::central_diff(logI_a, a, 1e-6 * a);
        const double fb = oracle::central_diff(logI_b, b, 1e-6 * b);
        EXPECT_NEAR(d.dlog_da, fa, std::max(1e-5, 1e-6 * std::abs(fa))) << x << " " << a << " " << b;
        EXPECT_NEAR(d.dlog_db, fb, std::max(1e-5, 1e-6 * std::abs(fb))) << x << " " << a << " " << b;
        EXPECT_NEAR(d.log_tail, std::log(oracle::ibeta(x, a, b)), 1e-12 * std::abs(d.log_tail) + 1e-14);
      }
    }
  }
  EXPECT_GT(hyper, 0);
}

TEST(TailDerivatives, HypergeometricAndSeriesRoutesAgree) {
  for (double x : {0.02, 0.15, 0.4}) {
    for (double a : {0.3, 2.0, 25.0}) {
      for (double b : {0.5, 3.0, 30.0}) {
        const TailLogDerivs h =
            lower_tail_log_derivs(x, a, b, log_beta_fn(a, b), digamma(a), digamma(b), digamma(a + b));
        const BetaTailDerivs s = reg_inc_beta_shape_derivs(x, a, b);
        EXPECT_NEAR(h.dlog_da, s.dlower_dp, 1e-8 * std::max(1.0, std::abs(s.dlower_dp))) << x << " " << a << " " << b;
        EXPECT_NEAR(h.dlog_db, s.dlower_dq, 1e-8 * std::max(1.0, std::abs(s.dlower_dq))) << x << " " << a << " " << b;
      }
    }
  }
}

TEST(XBTerm, GradientMatchesFiniteDifferences) {
  for (double y : {0.0, 0.02, 0.5, 0.97, 1.0}) {
    for (double mu : {0.15, 0.5, 0.9}) {
      for (double phi : {0.8, 5.0, 70.0}) {
        for (double u : {0.003, 0.2, 4.0}) {
          const XBTerm t = xb_term(y, u, make_shape_cache(mu, phi), true);
          EXPECT_NEAR(t.loglik, xb_logpdf(y, {mu, phi, u}), 1e-12 * std::max(1.0, std::abs(t.loglik)));
          auto f_mu = [&](double m) { return xb_logpdf(y, {m, phi, u}); };
          auto f_phi = [&](double v) { return xb_logpdf(y, {mu, v, u}); };
          auto f_u = [&](double v) { return xb_logpdf(y, {mu, phi, v}); };
          const double g_mu = oracle::central_diff(f_mu, mu, 1e-6 * mu);
          const double g_phi = oracle::central_diff(f_phi, phi, 1e-6 * phi);
          const double g_u = oracle::central_diff(f_u, u, 1e-6 * u);
          EXPECT_NEAR(t.d_mu, g_mu, std::max(1e-5, 1e-6 * std::abs(g_mu))) << y << " " << mu << " " << phi << " " << u;
          EXPECT_NEAR(t.d_phi, g_phi, std::max(1e-5, 1e-6 * std::abs(g_phi))) << y << " " << mu << " " << phi << " " << u;
          EXPECT_NEAR(t.d_u, g_u, std::max(1e-5, 1e-6 * std::abs(g_u))) << y << " " << mu << " " << phi << " " << u;
        }
      }
    }
  }
}

// ---------------------------------------------------------------- likelihood

Dataset tiny(std::initializer_list<double> ys) {
  Dataset d;
  d.y = Eigen::VectorXd::Map(std::data(ys), static_cast<Eigen::Index>(ys.size()));
  d.X = Eigen::MatrixXd::Ones(d.y.size(), 1);
  d.Z = Eigen::MatrixXd::Ones(d.y.size(), 1);
  return d;
}

ParameterVector params(std::initializer_list<double> beta, std::initializer_list<double> gamma,
                       std::optional<double> xi = std::nullopt) {
  ParameterVector p;
  p.beta = Eigen::VectorXd::Map(std::data(beta), static_cast<Eigen::Index>(beta.size()));
  p.gamma = Eigen::VectorXd::Map(std::data(gamma), static_cast<Eigen::Index>(gamma.size()));
  p.xi = xi;
  return p;
}

TEST(LinearPredictors, Examples) {
  Dataset d;
  d.y = Eigen::VectorXd::Constant(2, 0.5);
  d.X.resize(2, 2);
  d.X << 1, -1, 1, 1;
  d.Z = d.X;
  const ModelSpec spec = ModelSpec::defaults(Family::XBX);
  LinearPredictors lp = linear_predictors(spec, d, params({0, 0}, {std::log(2.0), 0}));
  EXPECT_EQ(lp.mu(0), 0.5);
  EXPECT_EQ(lp.mu(1), 0.5);
  EXPECT_NEAR(lp.phi(0), 2.0, 1e-15);
  EXPECT_NEAR(lp.phi(1), 2.0, 1e-15);
  // Settings table: logit(0.05) = -2.944 at x = -1 and logit(0.5) = 0 at x = +1.
  lp = linear_predictors(spec, d, params({-1.472, 1.472}, {0, 0}));
  EXPECT_NEAR(lp.mu(0), 0.05, 1e-3);
  EXPECT_NEAR(lp.mu(1), 0.50, 1e-3);
  EXPECT_THROW(linear_predictors(spec, d, params({0}, {0, 0})), ShapeError);
}

TEST(LoglikXBX, BetaLimit) {
  const Dataset d = tiny({0.5});
  EXPECT_NEAR(loglik_xbx(params({0}, {std::log(2.0)}, std::log(1e-8)), d, gauss_laguerre(20)), 0.0, 1e-6);
}

TEST(LoglikXBX, MatchesAdaptiveIntegrals) {
  const Dataset d = tiny({0.0, 0.5, 1.0});
  double ref = 0.0;
  for (double y : {0.0, 0.5, 1.0}) ref += std::log(oracle::xbx_density(y, 0.5, 2.0, 0.5));
  EXPECT_NEAR(loglik_xbx(params({0}, {std::log(2.0)}, std::log(0.5)), d, gauss_laguerre(20)), ref, 1e-6);
}

TEST(LoglikXBX, PermutationInvariant) {
  Dataset d = synthetic::xbx_data(60, {-0.3, 0.8}, {1.0, 0.4}, 0.2, 3);
  std::vector<Eigen::Index> order(60);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937(1));
  const ParameterVector th = params({-0.3, 0.8}, {1.0, 0.4}, std::log(0.2));
  const auto& rule = gauss_laguerre(20);
  EXPECT_NEAR(loglik_xbx(th, d, rule), loglik_xbx(th, d.permuted(order), rule), 1e-11);
}

TEST(LoglikXBX, RejectsOverflowingPrecision) {
  const Dataset d = tiny({0.2, 0.4, 0.9});
  EXPECT_THROW(loglik_xbx(params({0}, {std::log(2e8)}, -2.0), d, gauss_laguerre(20)), EvaluationError);
}

TEST(LoglikFamily, Examples) {
  // XB point masses: p0 = p1 = 0.25 for (0.5, 2, 0.5).
  ModelSpec xb = ModelSpec::defaults(Family::XBFixed);
  xb.fixed_u = 0.5;
  EXPECT_NEAR(loglik_family(xb, params({0}, {std::log(2.0)}), tiny({0.0, 1.0})), 2.0 * std::log(0.25), 1e-14);

  // Censored normal on interior data is the heteroscedastic normal likelihood.
  Dataset d = synthetic::cn_data(80, {0.5, 0.2}, {-2.0, 0.3}, 4);
  for (Eigen::Index i = 0; i < d.n(); ++i) d.y(i) = std::clamp(d.y(i), 0.01, 0.99);
  const ParameterVector th = params({0.45, 0.25}, {-1.9, 0.2});
  EXPECT_EQ(loglik_family(ModelSpec::defaults(Family::CensoredNormal), th, d),
            loglik_family(ModelSpec::defaults(Family::Normal), th, d));
}

TEST(LoglikFamily, BetaRescaledIncludesJacobian) {
  ModelSpec spec = ModelSpec::defaults(Family::BetaRescaled);
  spec.rescale_u = 0.1;
  const Dataset d = tiny({0.0, 0.3, 1.0});
  double ref = 0.0;
  for (double y : {0.0, 0.3, 1.0}) ref += std::log(oracle::beta_density((y + 0.1) / 1.2, 1.2, 1.8) / 1.2);
  EXPECT_NEAR(loglik_family(spec, params({std::log(0.4 / 0.6)}, {std::log(3.0)}), d), ref, 1e-12);
}

TEST(LoglikFamily, XBFixedWithoutExceedanceRejectsBoundaryData) {
  EXPECT_THROW(loglik_family(ModelSpec::defaults(Family::XBFixed), params({0}, {0}), tiny({0.0, 0.4})),
               DomainError);
}

TEST(LoglikFamily, ScaleBridgeBetweenXBAndRescaledBeta) {
  Dataset d = synthetic::xbx_data(100, {0.2, 0.6}, {1.5, 0.3}, 0.01, 8);
  for (Eigen::Index i = 0; i < d.n(); ++i) d.y(i) = std::clamp(d.y(i), 1e-3, 1 - 1e-3);
  ModelSpec xb = ModelSpec::defaults(Family::XBFixed);
  xb.fixed_u = 1e-6;
  ModelSpec b = ModelSpec::defaults(Family::BetaRescaled);
  b.rescale_u = 1e-6;
  const FitResult fx = fit(xb, d);
  const FitResult fb = fit(b, d);
  EXPECT_NEAR(fx.loglik, fb.loglik, 1e-3);
}

// Gradient check over random parameter points, all families.
struct GradientCase {
  Family family;
  int points;
};

class GradientCheck : public ::testing::TestWithParam<GradientCase> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const GradientCase gc = GetParam();
  Dataset d = synthetic::xbx_data(50, {0.0, 1.2}, {0.8, 0.5}, 0.3, 17);
  int boundary = 0;
  for (Eigen::Index i = 0; i < d.n(); ++i) boundary += d.y(i) == 0.0 || d.y(i) == 1.0;
  ASSERT_GT(boundary, 3);
  ModelSpec spec = ModelSpec::defaults(gc.family);
  if (gc.family == Family::XBFixed) spec.fixed_u = 0.15;
  LogLikelihood ll(spec, d);
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool normal = gc.family == Family::Normal || gc.family == Family::CensoredNormal;
  for (int k = 0; k < gc.points; ++k) {
    Eigen::VectorXd th(ll.dim());
    if (normal) {
      th << 0.2 + 0.6 * unif(gen), -0.5 + unif(gen), -2.5 + 1.5 * unif(gen), -0.5 + unif(gen);
    } else {
      th(0) = -1.5 + 3.0 * unif(gen);
      th(1) = -1.5 + 3.0 * unif(gen);
      th(2) = -0.5 + 4.0 * unif(gen);
      th(3) = -1.0 + 2.0 * unif(gen);
      if (ll.dim() > 4) th(4) = std::log(0.02) + (std::log(2.0) - std::log(0.02)) * unif(gen);
    }
    Eigen::VectorXd g;
    ll.value_and_gradient(th, g);
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(th(j)));
      Eigen::VectorXd tp = th, tm = th;
      tp(j) += h;
      tm(j) -= h;
      const double fd = (ll.value(tp) - ll.value(tm)) / (2.0 * h);
      EXPECT_NEAR(g(j), fd, std::max(1e-5, 1e-6 * std::abs(fd))) << "point " << k << " coord " << j;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Families, GradientCheck,
                         ::testing::Values(GradientCase{Family::Normal, 50}, GradientCase{Family::CensoredNormal, 50},
                                           GradientCase{Family::BetaRescaled, 50}, GradientCase{Family::XBFixed, 50},
                                           GradientCase{Family::XBX, 50}),
                         [](const auto& info) { return family_name(info.param.family); });

TEST(ScoreXBX, InteriorMeanBlockFormula) {
  Dataset d = synthetic::xbx_data(40, {0.1, 0.5}, {1.0, 0.2}, 0.05, 21);
  for (Eigen::Index i = 0; i < d.n(); ++i) d.y(i) = std::clamp(d.y(i), 0.02, 0.98);
  const ParameterVector th = params({0.1, 0.5}, {1.0, 0.2}, std::log(0.05));
  const QuadratureRule rule = gauss_laguerre(20);
  const Eigen::VectorXd g = score_xbx(th, d, rule);
  const LinearPredictors lp = linear_predictors(ModelSpec::defaults(Family::XBX), d, th);
  const double nu = 0.05;
  Eigen::Vector2d expect = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double mu = lp.mu(i), phi = lp.phi(i), y = d.y(i);
    double den = 0.0, num = 0.0;
    for (int t = 0; t < rule.order; ++t) {
      const double u = nu * rule.nodes[t];
      const double L = xb_pdf(y, {mu, phi, u});
      const double w = (y + u) / (1 + 2 * u), w1 = (1 - y + u) / (1 + 2 * u);
      const double T = std::log(w) - oracle::digamma(mu * phi) + oracle::digamma(phi);
      const double U = std::log(w1) - oracle::digamma((1 - mu) * phi) + oracle::digamma(phi);
      den += rule.weights[t] * L;
      num += rule.weights[t] * L * phi * (T - U);
    }
    expect += d.X.row(i).transpose() * (num / den) * mu * (1 - mu);
  }
  EXPECT_NEAR(g(0), expect(0), 1e-9 * std::max(1.0, std::abs(expect(0))));
  EXPECT_NEAR(g(1), expect(1), 1e-9 * std::max(1.0, std::abs(expect(1))));
}

// ---------------------------------------------------------------- fitting

TEST(Fit, NormalInterceptIsSampleMean) {
  Dataset d = tiny({0.1, 0.4, 0.45, 0.8, 1.0, 0.0});
  const FitResult f = fit(ModelSpec::defaults(Family::Normal), d);
  EXPECT_NEAR(f.theta_hat.beta(0), d.y.mean(), 1e-7);
}

TEST(Fit, SymmetricDataGivesHalf) {
  Dataset d = tiny({0.3, 0.7, 0.45, 0.55, 0.5, 0.2, 0.8});
  const FitResult f = fit(ModelSpec::defaults(Family::BetaRescaled), d);
  EXPECT_NEAR(f.fitted_mu(0), 0.5, 1e-6);
}

TEST(Fit, ConstantResponseHasNoFiniteMaximum) {
  // Precision diverges when every response is identical.
  EXPECT_THROW(fit(ModelSpec::defaults(Family::BetaRescaled), tiny({0.5, 0.5, 0.5, 0.5})), FitError);
}

TEST(Fit, RecoversXBXParameters) {
  const Dataset d = synthetic::xbx_data(2000, {-0.5, 1.0}, {1.5, 0.5}, 0.1, 99);
  const FitResult f = fit(ModelSpec::defaults(Family::XBX), d);
  ASSERT_TRUE(f.converged);
  ASSERT_TRUE(f.vcov.has_value());
  const Eigen::VectorXd se = f.standard_errors();
  const Eigen::VectorXd truth = (Eigen::VectorXd(5) << -0.5, 1.0, 1.5, 0.5, std::log(0.1)).finished();
  const Eigen::VectorXd est = f.theta_hat.flat();
  for (int j = 0; j < 5; ++j) EXPECT_LT(std::abs(est(j) - truth(j)), 3.0 * se(j)) << j;
  EXPECT_LE(f.gradient_norm, 1e-6 * (1.0 + std::abs(f.loglik)));
  EXPECT_NEAR(f.aic, -2 * f.loglik + 2 * 5, 1e-9);
  EXPECT_NEAR(f.bic, -2 * f.loglik + std::log(2000.0) * 5, 1e-9);
  // vcov symmetric positive definite
  EXPECT_LT((*f.vcov - f.vcov->transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(*f.vcov).info(), Eigen::Success);
}

TEST(Fit, FullModelDominatesPinnedExceedance) {
  const Dataset d = synthetic::xbx_data(300, {0.3, -0.6}, {1.0, 0.0}, 0.2, 5);
  const FitResult full = fit(ModelSpec::defaults(Family::XBX), d);
  for (double nu : {0.01, 0.1, 0.5, 2.0}) {
    FitOptions o;
    o.fixed_xi = std::log(nu);
    const FitResult pinned = fit(ModelSpec::defaults(Family::XBX), d, o);
    EXPECT_GE(full.loglik, pinned.loglik - 1e-6) << nu;
    EXPECT_EQ(pinned.dim(), 4);
    EXPECT_EQ(pinned.vcov->rows(), 4);
  }
}

TEST(Fit, PermutationInvariant) {
  const Dataset d = synthetic::xbx_data(200, {0.3, 0.8}, {1.2, 0.3}, 0.15, 13);
  std::vector<Eigen::Index> order(200);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937(7));
  const FitResult a = fit(ModelSpec::defaults(Family::XBX), d);
  const FitResult b = fit(ModelSpec::defaults(Family::XBX), d.permuted(order));
  EXPECT_LT((a.theta_hat.flat() - b.theta_hat.flat()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(a.loglik, b.loglik, 1e-10);
}

TEST(Fit, NormalAttenuatesTowardZero) {
  int attenuated = 0;
  for (int r = 0; r < 100; ++r) {
    const Dataset d = synthetic::cn_data(200, {0.5, 0.6}, {std::log(0.25), 0.0}, 1000 + r);
    int boundary = 0;
    for (Eigen::Index i = 0; i < d.n(); ++i) boundary += d.y(i) == 0.0 || d.y(i) == 1.0;
    ASSERT_GE(boundary, 20);
    const double slope_n = fit(ModelSpec::defaults(Family::Normal), d).theta_hat.beta(1);
    const double slope_cn = fit(ModelSpec::defaults(Family::CensoredNormal), d).theta_hat.beta(1);
    attenuated += std::abs(slope_n) <= std::abs(slope_cn);
  }
  EXPECT_GE(attenuated, 90);
}

TEST(Predict, TotalProbabilityAndShapes) {
  const Dataset d = synthetic::xbx_data(150, {0.2, 0.7}, {1.0, 0.2}, 0.1, 77);
  const FitResult f = fit(ModelSpec::defaults(Family::XBX), d);
  PredictionTargets t;
  t.params = true;
  t.p_above = {0.0};
  t.cdf_at = {0.0};
  const PredictionTable p = predict(f, d, t);
  ASSERT_EQ(p.columns.size(), 6u);
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    EXPECT_NEAR(p.values(i, 4) + p.values(i, 5), 1.0, 1e-10);
    EXPECT_NEAR(p.values(i, 1), f.fitted_mu(i), 1e-15);
  }
  Dataset bad = d;
  bad.X = bad.X.leftCols(1);
  EXPECT_THROW(predict(f, bad, t), ShapeError);
}

TEST(Dataset, Validation) {
  Dataset d = tiny({0.2, 0.3, 1.2});
  EXPECT_THROW(d.validate(), DataError);
  d = tiny({0.2, 0.3});
  EXPECT_THROW(d.validate(), DataError);  // n < p + q + 1
  d = tiny({0.2, 0.3, 0.4});
  d.Z = Eigen::MatrixXd::Ones(2, 1);
  EXPECT_THROW(d.validate(), ShapeError);
}

}  // namespace
