// Beta, XB, XBX and censored normal distributions.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "xbx/dist.hpp"
#include "xbx/errors.hpp"
#include "xbx/special.hpp"

using namespace xbx;

namespace {

const QuadratureRule& rule20() {
  static const QuadratureRule r = gauss_laguerre(20);
  return r;
}

TEST(Beta, Examples) {
  EXPECT_NEAR(beta_pdf(0.5, {0.5, 2.0}), 1.0, 1e-15);
  EXPECT_NEAR(beta_pdf(0.25, {0.5, 4.0}), 1.125, 1e-14);
  EXPECT_NEAR(beta_cdf(0.25, {0.5, 4.0}), 0.15625, 1e-15);
  EXPECT_THROW(beta_pdf(0.0, {0.5, 2.0}), DomainError);
  EXPECT_THROW(beta_pdf(1.0, {0.5, 2.0}), DomainError);
}

TEST(Params, DomainChecks) {
  EXPECT_THROW(validate(BetaParams{0.0, 1.0}), DomainError);
  EXPECT_THROW(validate(BetaParams{0.5, -1.0}), DomainError);
  EXPECT_THROW(validate(XBParams{0.5, 1.0, -0.1}), DomainError);
  EXPECT_THROW(validate(XBXParams{0.5, 1.0, 0.0}), DomainError);
  EXPECT_THROW(validate(CensNormParams{0.5, 0.0}), DomainError);
  EXPECT_THROW(validate(B4Params{0.5, 1.0, 1.0, 0.0}), DomainError);
}

TEST(B4, RescaledBeta) {
  // B4 on (-1, 2) with Beta(2, 2): density 6w(1-w)/3 at w = (y + 1)/3
  const double y = 0.4, w = (y + 1.0) / 3.0;
  EXPECT_NEAR(b4_pdf(y, {0.5, 4.0, -1.0, 2.0}), 6 * w * (1 - w) / 3.0, 1e-14);
  EXPECT_EQ(b4_pdf(2.5, {0.5, 4.0, -1.0, 2.0}), 0.0);
}

TEST(XB, Examples) {
  EXPECT_EQ(xb_pdf(0.3, {0.7, 5.0, 0.0}), beta_pdf(0.3, {0.7, 5.0}));
  EXPECT_NEAR(xb_pdf(0.0, {0.5, 2.0, 0.5}), 0.25, 1e-15);
  EXPECT_NEAR(xb_pdf(1.0, {0.5, 2.0, 0.5}), 0.25, 1e-15);
  EXPECT_NEAR(xb_pdf(0.5, {0.5, 2.0, 0.5}), 0.5, 1e-15);
  EXPECT_EQ(xb_logpdf(0.0, {0.5, 2.0, 0.0}), -INFINITY);
  EXPECT_EQ(xb_logpdf(1.0, {0.5, 2.0, 0.0}), -INFINITY);
}

TEST(XB, AgreesWithBoostOracle) {
  for (double y : {0.0, 0.02, 0.4, 0.97, 1.0}) {
    for (double mu : {0.1, 0.6}) {
      for (double phi : {0.7, 15.0, 400.0}) {
        for (double u : {0.01, 0.3, 3.0}) {
          const double ref = oracle::xb_density(y, mu, phi, u);
          EXPECT_NEAR(xb_pdf(y, {mu, phi, u}), ref, 1e-12 * ref + 1e-300) << y << " " << mu << " " << phi << " " << u;
          if (y < 1.0) EXPECT_NEAR(xb_cdf(y, {mu, phi, u}), oracle::xb_cdf(y, mu, phi, u), 1e-13);
        }
      }
    }
  }
}

TEST(XB, CdfConventions) {
  const XBParams p{0.4, 3.0, 0.2};
  EXPECT_EQ(xb_cdf(1.0, p), 1.0);
  EXPECT_NEAR(xb_cdf(0.0, p), xb_pdf(0.0, p), 1e-15);
  EXPECT_NEAR(xb_cdf(std::nextafter(1.0, 0.0), p), 1.0 - xb_pdf(1.0, p), 1e-14);
}

TEST(XBX, Examples) {
  EXPECT_NEAR(xbx_pdf(0.5, {0.5, 2.0, 1e-8}, rule20()), 1.0, 1e-6);
  EXPECT_NEAR(xbx_pdf(0.3, {0.7, 5.0, 0.2}, rule20()), xbx_pdf(0.7, {0.3, 5.0, 0.2}, rule20()), 1e-13);
}

TEST(XBX, BoundaryMassConvergesToAdaptiveIntegral) {
  // The mass at 1 behaves like u^q near u = 0, so the rule converges algebraically.
  const double ref = oracle::xbx_density(1.0, 0.7, 5.0, 0.25);
  double previous = 1.0;
  for (int T : {20, 80, 256}) {
    const double rel = std::abs(xbx_pdf(1.0, {0.7, 5.0, 0.25}, gauss_laguerre(T)) - ref) / ref;
    EXPECT_LT(rel, previous);
    previous = rel;
  }
  EXPECT_LT(std::abs(xbx_pdf(1.0, {0.7, 5.0, 0.25}, rule20()) - ref) / ref, 2e-4);
  EXPECT_LT(previous, 1e-6);
}

TEST(XBX, CdfExamples) {
  const XBXParams p{0.5, 2.0, 0.1};
  EXPECT_EQ(xbx_cdf(1.0, p, rule20()), 1.0);
  EXPECT_NEAR(xbx_cdf(0.0, p, rule20()), xbx_pdf(0.0, p, rule20()), 1e-12);
  EXPECT_NEAR(xbx_cdf(0.5, p, rule20()), 0.5, 1e-10);
}

TEST(XBX, MatchesAdaptiveIntegrationWhereSmooth) {
  for (double y : {0.3, 0.5, 0.7}) {
    for (double mu : {0.25, 0.5, 0.75}) {
      for (double phi : {2.0, 20.0}) {
        for (double nu : {0.02, 0.1}) {
          const double ref = oracle::xbx_density(y, mu, phi, nu);
          EXPECT_NEAR(xbx_pdf(y, {mu, phi, nu}, rule20()), ref, 1e-6 * ref)
              << y << " " << mu << " " << phi << " " << nu;
        }
      }
    }
  }
}

TEST(XBX, LatentMoments) {
  EXPECT_NEAR(xbx_latent_moments({0.5, 3.0, 0.7}).mean, 0.5, 1e-15);
  const LatentMoments m = xbx_latent_moments({0.7, 20.0, 0.1});
  EXPECT_NEAR(m.mean, 0.74, 1e-12);
  // (0.4)^2 0.01 + (1 + 0.4 + 0.08) 0.21 / 21
  EXPECT_NEAR(m.variance, 0.0016 + 1.48 * 0.01, 1e-12);
  const LatentMoments tiny = xbx_latent_moments({0.3, 4.0, 1e-12});
  EXPECT_NEAR(tiny.variance, 0.21 / 5.0, 1e-11);
}

TEST(XBX, LatentMomentsMonteCarlo) {
  Rng rng(20240501);
  const XBXParams p{0.7, 20.0, 0.1};
  const int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = sample_xbx_latent(p, rng);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  const LatentMoments m = xbx_latent_moments(p);
  EXPECT_NEAR(mean, m.mean, 3.0 * std::sqrt(m.variance / n));
  EXPECT_NEAR(var, m.variance, 0.02 * m.variance);
}

TEST(CensoredNormal, Examples) {
  const CensNormParams std{0.0, 1.0};
  EXPECT_NEAR(std::exp(cn_logpdf(0.0, std)), 0.5, 1e-15);
  EXPECT_NEAR(std::exp(cn_logpdf(1.0, std)), 0.15865525393145707, 1e-14);
  EXPECT_LT(std::exp(cn_logpdf(0.0, {0.5, 0.01})), 1e-300);
  EXPECT_TRUE(std::isfinite(cn_logpdf(0.0, {0.5, 0.01})));
  EXPECT_NEAR(cn_cdf(0.3, {0.2, 0.5}), oracle::normal_cdf(0.2), 1e-14);
  EXPECT_EQ(cn_cdf(1.0, std), 1.0);
}

TEST(Samplers, BetaHasNoBoundaryDraws) {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double v = sample_xb({0.02, 0.3, 0.0}, rng);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Samplers, XBMassAtZero) {
  Rng rng(11);
  const int n = 1000000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += sample_xb({0.5, 2.0, 0.5}, rng) == 0.0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.25, 0.0013);
}

TEST(Samplers, Deterministic) {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_xbx({0.3, 4.0, 0.2}, a), sample_xbx({0.3, 4.0, 0.2}, b));
}

TEST(Samplers, XBXKolmogorovSmirnov) {
  Rng rng(31337);
  const XBXParams p{0.35, 3.0, 0.15};
  const int n = 100000;
  std::vector<double> draws(n);
  for (double& v : draws) v = sample_xbx(p, rng);
  std::sort(draws.begin(), draws.end());
  // Sup distance between the empirical and model CDFs, evaluated on both sides of each jump.
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i + 1 < n && draws[i + 1] == draws[i]) continue;
    const double F = xbx_cdf(draws[i], p, rule20());
    d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
    const double Fminus = draws[i] == 0.0 ? 0.0 : (draws[i] == 1.0 ? 1.0 - xbx_pdf(1.0, p, rule20()) : F);
    int first = i;
    while (first > 0 && draws[first - 1] == draws[i]) --first;
    d = std::max(d, std::abs(Fminus - static_cast<double>(first) / n));
  }
  EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(Normalization, AllFamiliesOnGrid) {
  for (double mu : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    for (double phi : {0.5, 2.0, 20.0, 100.0}) {
      for (double u : {0.0, 1.0 / 64.0, 0.1, 0.5, 2.0}) {
        const double p = mu * phi, q = (1 - mu) * phi;
        const double m = std::max(2.0, 2.0 / std::min({p, q, 1.0}));
        const XBDistribution xb({mu, phi, u});
        const XBDistribution xb_reflected({1.0 - mu, phi, u});
        const double total_xb = xb.mass_at_zero() + xb.mass_at_one() +
                                oracle::singular_integral([&](double y) { return xb.density(y); },
                                                          [&](double t) { return xb_reflected.density(t); }, m);
        EXPECT_NEAR(total_xb, 1.0, 1e-8) << "xb " << mu << " " << phi << " " << u;
        if (u > 0.0) {
          const XBXDistribution xbx({mu, phi, u}, laguerre_rule(20));
          const XBXDistribution xbx_reflected({1.0 - mu, phi, u}, laguerre_rule(20));
          const double total = xbx.mass_at_zero() + xbx.mass_at_one() +
                               oracle::singular_integral([&](double y) { return xbx.density(y); },
                                                         [&](double t) { return xbx_reflected.density(t); }, 2.0);
          EXPECT_NEAR(total, 1.0, 1e-8) << "xbx " << mu << " " << phi << " " << u;
        }
      }
      const CensoredNormalDistribution cn({mu, std::sqrt(mu * (1 - mu) / (1 + phi))});
      const double total_cn = cn.mass_at_zero() + cn.mass_at_one() +
                              oracle::adaptive([&](double y) { return cn.density(y); }, 0.0, 1.0, 1e-12);
      EXPECT_NEAR(total_cn, 1.0, 1e-8);
    }
  }
}

TEST(TheoremOne, ZeroExceedanceIsBeta) {
  for (double y = 0.01; y < 0.995; y += 0.01) {
    EXPECT_EQ(xb_pdf(y, {0.3, 7.0, 0.0}), beta_pdf(y, {0.3, 7.0}));
    EXPECT_EQ(xb_cdf(y, {0.3, 7.0, 0.0}), beta_cdf(y, {0.3, 7.0}));
  }
}

TEST(TheoremOne, LargeExceedanceApproachesCensoredNormal) {
  const double mu_star = 0.5, sigma_star = 0.15, u = 1e4;
  const double scale = 1.0 + 2.0 * u;
  const double mu = (mu_star + u) / scale;
  const double sigma2 = sigma_star * sigma_star / (scale * scale);
  const double phi = mu * (1.0 - mu) / sigma2 - 1.0;
  double sup = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double y = i / 200.0;
    sup = std::max(sup, std::abs(xb_cdf(y, {mu, phi, u}) - cn_cdf(y, {mu_star, sigma_star})));
  }
  EXPECT_LE(sup, 0.005);
}

TEST(CensoredMean, Examples) {
  EXPECT_NEAR(censored_mean(BetaDistribution({0.5, 1e6})), 0.5, 1e-4);
  EXPECT_NEAR(censored_mean(XBDistribution({0.5, 1e6, 0.01})), 0.5, 1e-4);
  // int_0^1 (1 - Phi(t)) dt = phi(0) - phi(1) + 1 - Phi(1)
  const double ref = oracle::adaptive([](double t) { return 1.0 - oracle::normal_cdf(t); }, 0.0, 1.0, 1e-14);
  EXPECT_NEAR(censored_mean(CensoredNormalDistribution({0.0, 1.0})), ref, 1e-12);
  EXPECT_NEAR(ref, 0.3156268, 1e-7);
  for (double phi : {0.7, 5.0}) {
    for (double nu : {0.05, 0.8}) {
      EXPECT_NEAR(censored_mean(XBXDistribution({0.5, phi, nu}, laguerre_rule(20))), 0.5, 1e-9);
    }
  }
}

TEST(CensoredMean, ClosedFormsMatchCdfIntegral) {
  // E(Y) = \int_0^1 P(Y > t) dt
  auto by_cdf = [](const MixedDistribution& d) {
    return oracle::adaptive([&](double t) { return 1.0 - d.cdf(t); }, 0.0, 1.0, 1e-13);
  };
  for (double mu : {0.1, 0.3, 0.85}) {
    for (double phi : {0.6, 4.0, 150.0}) {
      for (double u : {0.0, 0.01, 0.2, 3.0}) {
        const XBDistribution d({mu, phi, u});
        EXPECT_NEAR(censored_mean(d), by_cdf(d), 1e-10) << mu << " " << phi << " " << u;
      }
      const XBXDistribution x({mu, phi, 0.3}, laguerre_rule(20));
      EXPECT_NEAR(censored_mean(x), by_cdf(x), 1e-10);
    }
  }
  for (double m : {-0.4, 0.2, 1.3}) {
    const CensoredNormalDistribution c({m, 0.35});
    EXPECT_NEAR(censored_mean(c), by_cdf(c), 1e-12);
  }
}

TEST(CensoredMean, NumericRuleAgreesForRegularDistributions) {
  const XBDistribution d({0.3, 4.0, 0.2});
  EXPECT_NEAR(censored_mean_numeric(d), censored_mean(d), 1e-10);
  const CensoredNormalDistribution c({0.4, 0.3});
  EXPECT_NEAR(censored_mean_numeric(c), censored_mean(c), 1e-12);
}

TEST(CensoredMean, MonteCarlo) {
  Rng rng(5);
  const XBXParams p{0.3, 3.0, 0.2};
  const int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = sample_xbx(p, rng);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, sd = std::sqrt(s2 / n - mean * mean);
  // The quadrature mixture differs from the exact mixture by far less than the band.
  EXPECT_NEAR(censored_mean(XBXDistribution(p, laguerre_rule(40))), mean, 4.0 * sd / std::sqrt(n));
}

TEST(NormalDistribution, MeanIsLatentMean) {
  const NormalDistribution d({1.3, 0.4});
  EXPECT_EQ(d.mean(), 1.3);
  EXPECT_NEAR(d.prob_above(0.95), 1.0 - oracle::normal_cdf((0.95 - 1.3) / 0.4), 1e-14);
}

TEST(Quantile, InvertsCdf) {
  const XBXDistribution d({0.4, 6.0, 0.1}, laguerre_rule(20));
  for (double prob : {0.2, 0.5, 0.93}) {
    const double qv = quantile(d, prob);
    if (qv > 0.0 && qv < 1.0) EXPECT_NEAR(d.cdf(qv), prob, 1e-8);
  }
  EXPECT_EQ(quantile(d, d.mass_at_zero() / 2), 0.0);
}

}  // namespace
