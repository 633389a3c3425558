#pragma once

#include <cmath>
#include <cstdint>

#include "xbx/dist.hpp"
#include "xbx/model.hpp"
#include "xbx/rng.hpp"

namespace synthetic {

/// One covariate x ~ U(-1, 1) in both the mean and the precision model.
inline xbx::Dataset design(int n, std::uint64_t seed) {
  xbx::Rng rng(seed);
  xbx::Dataset d;
  d.y = Eigen::VectorXd::Zero(n);
  d.X.resize(n, 2);
  d.Z.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * rng.uniform() - 1.0;
    d.X(i, 0) = d.Z(i, 0) = 1.0;
    d.X(i, 1) = d.Z(i, 1) = x;
  }
  d.x_names = {"(Intercept)", "x"};
  d.z_names = {"(Intercept)", "x"};
  return d;
}

/// Responses from XBX with logit mean and log precision.
inline xbx::Dataset xbx_data(int n, const Eigen::Vector2d& beta, const Eigen::Vector2d& gamma, double nu,
                             std::uint64_t seed) {
  xbx::Dataset d = design(n, seed);
  xbx::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < n; ++i) {
    const double mu = 1.0 / (1.0 + std::exp(-d.X.row(i).dot(beta)));
    const double phi = std::exp(d.Z.row(i).dot(gamma));
    d.y(i) = xbx::sample_xbx({mu, phi, nu}, rng);
  }
  return d;
}

/// Responses from the two-limit tobit with identity mean and log scale.
inline xbx::Dataset cn_data(int n, const Eigen::Vector2d& beta, const Eigen::Vector2d& gamma,
                            std::uint64_t seed) {
  xbx::Dataset d = design(n, seed);
  xbx::Rng rng(seed ^ 0x5851f42d4c957f2dULL);
  for (int i = 0; i < n; ++i) {
    const double mu = d.X.row(i).dot(beta);
    const double sigma = std::exp(d.Z.row(i).dot(gamma));
    d.y(i) = std::clamp(mu + sigma * rng.normal(), 0.0, 1.0);
  }
  return d;
}

}  // namespace synthetic
