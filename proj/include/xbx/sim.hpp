#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <vector>

#include "xbx/model.hpp"

namespace xbx {

/// Intercept and slope on x in [-1, 1] reproducing the endpoint values.
struct ImpliedCoefficients {
  Eigen::Vector2d beta;   // logit scale
  Eigen::Vector2d gamma;  // log scale
};

/// Throws DomainError for mu endpoints outside (0, 1) or nonpositive phi.
ImpliedCoefficients implied_coefficients(double mu1, double mun, double phi1, double phin);

/// One cell of the simulation design: mean and precision ranges over the
/// covariate grid, exceedance u and sample size n.
struct SimSetting {
  int id = 0;
  double mu1 = 0.5;
  double mun = 0.5;
  double phi1 = 1.0;
  double phin = 1.0;
  double u = 0.0;
  int n = 500;
  ImpliedCoefficients coef{};
};

SimSetting make_setting(int id, double mu1, double mun, double phi1, double phin, double u, int n);

/// The ten mean ranges crossed with the seven precision ranges of the study,
/// with ids 0..69 (mean range varies slowest). u and n are left at defaults.
std::vector<SimSetting> study_settings();
/// Four settings for desk-scale runs: mean ranges (0.05, 0.5) and
/// (0.25, 0.75) crossed with precision ranges (0.5, 10) and (20, 50).
std::vector<SimSetting> desk_settings();
/// u in {2^-6, 2^-5, ..., 2}.
std::vector<double> study_u_grid();

struct SimData {
  Dataset train;
  Eigen::VectorXd test_y;
};

/// x on the equispaced grid over [-1, 1]; training and test responses are
/// independent XB draws. Deterministic in the seed.
SimData gen_dataset(const SimSetting& s, std::uint64_t seed);

/// Average over the covariate grid of P(0 < Y < 1).
double interior_probability(const SimSetting& s);
/// True when the average interior probability exceeds 0.05.
bool setting_filter(const SimSetting& s);

struct SimResult {
  SimSetting setting;
  int u_index = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  double S_xbx = 0.0;
  double S_cn = 0.0;
  double rel_change = 0.0;
  double boundary_fraction = 0.0;
  bool xbx_converged = false;
  bool cn_converged = false;

  bool ok() const { return xbx_converged && cn_converged; }
};

struct SimOptions {
  int replications = 20;
  int n = 500;
  std::uint64_t seed0 = 1;
  int threads = 1;
  /// Competing models; the defaults compare XBX with the censored normal.
  ModelSpec model_xbx = ModelSpec::defaults(Family::XBX);
  ModelSpec model_cn = ModelSpec::defaults(Family::CensoredNormal);
};

/// Seed for replication r of (setting, u index).
std::uint64_t replication_seed(std::uint64_t seed0, int setting_id, int u_index, int replication);

/// Fits both models on each replication's training data and scores them on
/// the test responses. Inadmissible (setting, u) pairs are skipped. A fit that
/// fails twice (the second time from jittered start values) is recorded as not
/// converged with NaN scores. Output is sorted by (setting, u, replication).
std::vector<SimResult> run_comparison(const std::vector<SimSetting>& settings, const std::vector<double>& u_grid,
                                      const SimOptions& options);

/// Per (setting, u) cell over converged replications.
struct SimSummary {
  SimSetting setting;
  int u_index = 0;
  int replications = 0;
  int failures = 0;
  double mean_rel_change = 0.0;
  double se_rel_change = 0.0;
  double mean_boundary_fraction = 0.0;
};

std::vector<SimSummary> summarize(const std::vector<SimResult>& results);

void write_results_csv(std::ostream& out, const std::vector<SimResult>& results);
void write_summary_csv(std::ostream& out, const std::vector<SimSummary>& summary);

}  // namespace xbx
