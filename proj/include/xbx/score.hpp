#pragma once

#include <Eigen/Dense>
#include <memory>
#include <ostream>
#include <vector>

#include "xbx/dist.hpp"
#include "xbx/model.hpp"

namespace xbx {

inline constexpr int kCrpsPointsPerSide = 128;

/// Continuous ranked probability score of `d` at an observation z in [0, 1]:
/// by composite Gauss-Legendre on each side, graded toward the panel ends.
/// by Gauss-Legendre on each side.
double crps(const MixedDistribution& d, double z);

/// Sum of row-wise scores. Throws ShapeError on a length mismatch.
double total_score(const std::vector<std::unique_ptr<MixedDistribution>>& dists, const Eigen::VectorXd& z);

/// Binned observed and expected frequencies. Bins are (lower, upper] except
/// the first, which is closed and so holds the point mass at 0.
struct RootogramTable {
  std::vector<double> breaks;
  Eigen::VectorXd observed;
  Eigen::VectorXd expected;

  Eigen::Index bins() const { return observed.size(); }
};

/// `bins` equal-width bins on [0, 1].
std::vector<double> equal_breaks(int bins = 10);

RootogramTable rootogram(const std::vector<std::unique_ptr<MixedDistribution>>& dists,
                         const Eigen::VectorXd& y, const std::vector<double>& breaks);
RootogramTable rootogram(const FitResult& fit, const Dataset& data, const std::vector<double>& breaks);

/// CSV with columns bin_lower, bin_upper, observed, expected, sqrt_observed,
/// sqrt_expected, hanging_residual (sqrt_observed - sqrt_expected).
void write_rootogram_csv(std::ostream& out, const RootogramTable& table);

}  // namespace xbx
