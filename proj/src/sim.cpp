#include "xbx/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <thread>
#include <tuple>

#include "xbx/dist.hpp"
#include "xbx/errors.hpp"
#include "xbx/fit.hpp"
#include "xbx/rng.hpp"
#include "xbx/score.hpp"

namespace xbx {

namespace {

constexpr double kMinInterior = 0.05;
constexpr double kJitter = 0.1;

double logit(double m) { return std::log(m) - std::log1p(-m); }

double grid_x(int i, int n) { return n == 1 ? 0.0 : 2.0 * i / (n - 1.0) - 1.0; }

void grid_params(const SimSetting& s, int i, double& mu, double& phi) {
  const double x = grid_x(i, s.n);
  mu = 1.0 / (1.0 + std::exp(-(s.coef.beta(0) + s.coef.beta(1) * x)));
  phi = std::exp(s.coef.gamma(0) + s.coef.gamma(1) * x);
}

struct Task {
  std::size_t setting;
  int u_index;
  int replication;
};

// Fit with one retry from jittered start values.
std::optional<FitResult> robust_fit(const ModelSpec& spec, const Dataset& data, std::uint64_t seed) {
  FitOptions opts;
  opts.compute_vcov = false;
  try {
    return fit(spec, data, opts);
  } catch (const std::exception&) {
  }
  ParameterVector start = start_values(spec, data);
  Rng rng(derive_seed(seed, {0x6a09e667ULL}));
  for (Eigen::Index j = 0; j < start.beta.size(); ++j) start.beta(j) += kJitter * rng.normal();
  for (Eigen::Index j = 0; j < start.gamma.size(); ++j) start.gamma(j) += kJitter * rng.normal();
  if (start.xi) *start.xi += kJitter * rng.normal();
  opts.start = start;
  try {
    return fit(spec, data, opts);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

SimResult run_one(const SimSetting& s, int u_index, int rep, const SimOptions& o) {
  SimResult r;
  r.setting = s;
  r.u_index = u_index;
  r.replication = rep;
  r.seed = replication_seed(o.seed0, s.id, u_index, rep);
  const SimData data = gen_dataset(s, r.seed);
  Eigen::Index boundary = 0;
  for (Eigen::Index i = 0; i < data.train.n(); ++i) boundary += data.train.y(i) == 0.0 || data.train.y(i) == 1.0;
  r.boundary_fraction = static_cast<double>(boundary) / static_cast<double>(data.train.n());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.S_xbx = r.S_cn = r.rel_change = nan;
  const auto fx = robust_fit(o.model_xbx, data.train, derive_seed(r.seed, {1}));
  const auto fc = robust_fit(o.model_cn, data.train, derive_seed(r.seed, {2}));
  r.xbx_converged = fx.has_value();
  r.cn_converged = fc.has_value();
  if (fx) r.S_xbx = total_score(fitted_distributions(*fx, data.train), data.test_y);
  if (fc) r.S_cn = total_score(fitted_distributions(*fc, data.train), data.test_y);
  if (r.ok()) r.rel_change = r.S_cn / r.S_xbx - 1.0;
  return r;
}

}  // namespace

ImpliedCoefficients implied_coefficients(double mu1, double mun, double phi1, double phin) {
  if (!(mu1 > 0.0 && mu1 < 1.0 && mun > 0.0 && mun < 1.0)) {
    throw DomainError("implied_coefficients: mean endpoints must lie in (0, 1)");
  }
  if (!(phi1 > 0.0 && phin > 0.0)) throw DomainError("implied_coefficients: precision endpoints must be positive");
  ImpliedCoefficients c;
  const double l1 = logit(mu1), ln = logit(mun);
  c.beta << 0.5 * (l1 + ln), 0.5 * (ln - l1);
  const double g1 = std::log(phi1), gn = std::log(phin);
  c.gamma << 0.5 * (g1 + gn), 0.5 * (gn - g1);
  return c;
}

SimSetting make_setting(int id, double mu1, double mun, double phi1, double phin, double u, int n) {
  if (!(u >= 0.0)) throw DomainError("make_setting: u must be nonnegative");
  if (n < 2) throw DomainError("make_setting: n must be at least 2");
  SimSetting s;
  s.id = id;
  s.mu1 = mu1;
  s.mun = mun;
  s.phi1 = phi1;
  s.phin = phin;
  s.u = u;
  s.n = n;
  s.coef = implied_coefficients(mu1, mun, phi1, phin);
  return s;
}

std::vector<SimSetting> study_settings() {
  static const double mu[][2] = {{0.05, 0.25}, {0.05, 0.50}, {0.05, 0.75}, {0.05, 0.95}, {0.25, 0.50},
                                 {0.25, 0.75}, {0.25, 0.95}, {0.50, 0.75}, {0.50, 0.95}, {0.75, 0.95}};
  static const double phi[][2] = {{0.5, 10.0}, {0.5, 20.0}, {0.5, 50.0}, {5.0, 100.0},
                                  {10.0, 20.0}, {20.0, 50.0}, {50.0, 100.0}};
  std::vector<SimSetting> out;
  int id = 0;
  for (const auto& m : mu) {
    for (const auto& p : phi) out.push_back(make_setting(id++, m[0], m[1], p[0], p[1], 0.0, 500));
  }
  return out;
}

std::vector<SimSetting> desk_settings() {
  const std::vector<SimSetting> all = study_settings();
  return {all[7], all[12], all[35], all[40]};
}

std::vector<double> study_u_grid() {
  std::vector<double> u;
  for (int k = -6; k <= 1; ++k) u.push_back(std::ldexp(1.0, k));
  return u;
}

SimData gen_dataset(const SimSetting& s, std::uint64_t seed) {
  if (s.n < 2) throw DomainError("gen_dataset: n must be at least 2");
  SimData d;
  d.train.y.resize(s.n);
  d.train.X.resize(s.n, 2);
  d.train.Z.resize(s.n, 2);
  d.train.x_names = {"(Intercept)", "x"};
  d.train.z_names = {"(Intercept)", "x"};
  d.test_y.resize(s.n);
  Rng rng(seed);
  for (int i = 0; i < s.n; ++i) {
    const double x = grid_x(i, s.n);
    d.train.X(i, 0) = d.train.Z(i, 0) = 1.0;
    d.train.X(i, 1) = d.train.Z(i, 1) = x;
    double mu = 0.0, phi = 0.0;
    grid_params(s, i, mu, phi);
    d.train.y(i) = sample_xb({mu, phi, s.u}, rng);
    d.test_y(i) = sample_xb({mu, phi, s.u}, rng);
  }
  return d;
}

double interior_probability(const SimSetting& s) {
  if (s.u == 0.0) return 1.0;
  double total = 0.0;
  for (int i = 0; i < s.n; ++i) {
    double mu = 0.0, phi = 0.0;
    grid_params(s, i, mu, phi);
    const XBDistribution d({mu, phi, s.u});
    total += 1.0 - d.mass_at_zero() - d.mass_at_one();
  }
  return total / s.n;
}

bool setting_filter(const SimSetting& s) { return interior_probability(s) > kMinInterior; }

std::uint64_t replication_seed(std::uint64_t seed0, int setting_id, int u_index, int replication) {
  return derive_seed(seed0, {static_cast<std::uint64_t>(setting_id), static_cast<std::uint64_t>(u_index),
                             static_cast<std::uint64_t>(replication)});
}

std::vector<SimResult> run_comparison(const std::vector<SimSetting>& settings, const std::vector<double>& u_grid,
                                      const SimOptions& options) {
  if (options.replications < 1) throw DomainError("run_comparison: need at least one replication");
  std::vector<SimSetting> cells;
  std::vector<Task> tasks;
  for (const SimSetting& base : settings) {
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
      SimSetting s = make_setting(base.id, base.mu1, base.mun, base.phi1, base.phin, u_grid[k], options.n);
      if (!setting_filter(s)) continue;
      cells.push_back(s);
      for (int r = 0; r < options.replications; ++r) tasks.push_back({cells.size() - 1, static_cast<int>(k), r});
    }
  }
  std::vector<SimResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      results[t] = run_one(cells[tasks[t].setting], tasks[t].u_index, tasks[t].replication, options);
    }
  };
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(results.begin(), results.end(), [](const SimResult& a, const SimResult& b) {
    return std::tie(a.setting.id, a.u_index, a.replication) < std::tie(b.setting.id, b.u_index, b.replication);
  });
  return results;
}

std::vector<SimSummary> summarize(const std::vector<SimResult>& results) {
  std::vector<SimSummary> out;
  std::size_t i = 0;
  while (i < results.size()) {
    std::size_t j = i;
    SimSummary s;
    s.setting = results[i].setting;
    s.u_index = results[i].u_index;
    double sum = 0.0, sum2 = 0.0, bsum = 0.0;
    while (j < results.size() && results[j].setting.id == s.setting.id && results[j].u_index == s.u_index) {
      const SimResult& r = results[j++];
      if (!r.ok()) {
        ++s.failures;
        continue;
      }
      ++s.replications;
      sum += r.rel_change;
      sum2 += r.rel_change * r.rel_change;
      bsum += r.boundary_fraction;
    }
    if (s.replications > 0) {
      const double k = s.replications;
      s.mean_rel_change = sum / k;
      s.mean_boundary_fraction = bsum / k;
      s.se_rel_change = s.replications > 1 ? std::sqrt(std::max(0.0, (sum2 - k * s.mean_rel_change * s.mean_rel_change) / (k - 1.0)) / k)
                                           : std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean_rel_change = s.se_rel_change = s.mean_boundary_fraction = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(s);
    i = j;
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<SimResult>& results) {
  out << "setting_id,mu1,mun,phi1,phin,u,replication,seed,S_xbx,S_cn,rel_change,boundary_fraction,"
         "xbx_converged,cn_converged\n";
  out << std::setprecision(17);
  for (const SimResult& r : results) {
    const SimSetting& s = r.setting;
    out << s.id << ',' << s.mu1 << ',' << s.mun << ',' << s.phi1 << ',' << s.phin << ',' << s.u << ','
        << r.replication << ',' << r.seed << ',' << r.S_xbx << ',' << r.S_cn << ',' << r.rel_change << ','
        << r.boundary_fraction << ',' << r.xbx_converged << ',' << r.cn_converged << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SimSummary>& summary) {
  out << "setting_id,mu1,mun,phi1,phin,u,replications,failures,mean_rel_change,se_rel_change,"
         "mean_boundary_fraction\n";
  out << std::setprecision(17);
  for (const SimSummary& c : summary) {
    const SimSetting& s = c.setting;
    out << s.id << ',' << s.mu1 << ',' << s.mun << ',' << s.phi1 << ',' << s.phin << ',' << s.u << ','
        << c.replications << ',' << c.failures << ',' << c.mean_rel_change << ',' << c.se_rel_change << ','
        << c.mean_boundary_fraction << '\n';
  }
}

}  // namespace xbx
