#include "xbx/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "xbx/errors.hpp"
#include "xbx/fit.hpp"
#include "xbx/infer.hpp"
#include "xbx/io.hpp"
#include "xbx/quad.hpp"
#include "xbx/score.hpp"
#include "xbx/sim.hpp"

namespace xbx::cli {

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kConvergence = 4;

struct ModelArgs {
  std::string data;
  std::string response;
  std::string mean;
  std::string precision;
  std::string family = "xbx";
  std::string link_mean;
  std::string link_precision;
  std::string range = "0,1";
  std::string factors;
  int quad_order = kDefaultLaguerreOrder;
  double u = -1.0;
  double nu = -1.0;
  int threads = 1;
  std::string out;
};

struct Config {
  ModelArgs model;
  std::string model_path;
  std::string null_model;
  std::string restrict_spec;
  std::string targets = "mean";
  std::string p_above;
  std::string p_below;
  std::string cdf_at;
  std::string breaks = "10";
  std::string settings = "desk";
  std::string u_grid;
  int replications = 20;
  int n = 500;
  std::uint64_t seed = 1;
  int order = kDefaultLaguerreOrder;
};

// Writes to the named file, or to stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw DataError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  bool is_stdout() const { return !file_.is_open(); }

 private:
  std::ofstream file_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_numbers(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError(std::string("cannot parse '") + item + "' in " + what);
    }
  }
  return out;
}

DesignSpec design_from(const ModelArgs& a) {
  DesignSpec d;
  d.response = a.response;
  d.mean_terms = split_list(a.mean);
  d.precision_terms = split_list(a.precision);
  d.factors = split_list(a.factors);
  const std::vector<double> r = parse_numbers(a.range, "--range");
  if (r.size() != 2 || !(r[0] < r[1])) throw DomainError("--range needs two values a,b with a < b");
  d.range_lower = r[0];
  d.range_upper = r[1];
  return d;
}

ModelSpec spec_from(const ModelArgs& a) {
  ModelSpec s = ModelSpec::defaults(parse_family(a.family));
  if (!a.link_mean.empty()) s.mean_link = LinkFunction::parse(a.link_mean);
  if (!a.link_precision.empty()) s.precision_link = LinkFunction::parse(a.link_precision);
  s.quad_order = a.quad_order;
  if (a.u >= 0.0) {
    if (s.family == Family::XBFixed) s.fixed_u = a.u;
    if (s.family == Family::BetaRescaled) s.rescale_u = a.u;
  }
  s.validate();
  return s;
}

struct LoadedModel {
  FitResult fit;
  DesignSpec design;
};

LoadedModel load_model(const std::string& path) {
  LoadedModel m;
  m.fit = fit_from_json(read_file(path), &m.design);
  return m;
}

Dataset load_data_for(LoadedModel& m, const std::string& path) {
  if (path.empty()) throw DomainError("--data is required");
  return ingest_csv(path, m.design);
}

int cmd_fit(const Config& c) {
  DesignSpec design = design_from(c.model);
  const ModelSpec spec = spec_from(c.model);
  const Dataset data = ingest_csv(c.model.data, design);
  FitOptions opts;
  opts.threads = c.model.threads;
  if (c.model.nu > 0.0) opts.fixed_xi = std::log(c.model.nu);
  const FitResult f = fit(spec, data, opts);
  for (const std::string& w : f.warnings) std::cerr << "warning: " << w << '\n';
  Output out(c.model.out);
  out.stream() << fit_to_json(f, &design) << '\n';
  return 0;
}

int cmd_predict(const Config& c) {
  LoadedModel m = load_model(c.model_path);
  const Dataset data = load_data_for(m, c.model.data);
  PredictionTargets t;
  t.mean = false;
  for (const std::string& name : split_list(c.targets)) {
    if (name == "mean") {
      t.mean = true;
    } else if (name == "params") {
      t.params = true;
    } else {
      throw DomainError("unknown prediction target '" + name + "'");
    }
  }
  t.p_above = parse_numbers(c.p_above, "--p-above");
  t.p_below = parse_numbers(c.p_below, "--p-below");
  t.cdf_at = parse_numbers(c.cdf_at, "--cdf-at");
  const PredictionTable p = predict(m.fit, data, t);
  Output out(c.model.out);
  std::ostream& os = out.stream();
  os << "row";
  for (const auto& col : p.columns) os << ',' << col;
  os << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
    os << i + 1;
    for (Eigen::Index j = 0; j < p.values.cols(); ++j) os << ',' << p.values(i, j);
    os << '\n';
  }
  return 0;
}

int cmd_test(const Config& c) {
  const LoadedModel full = load_model(c.model_path);
  TestResult r;
  if (!c.null_model.empty()) {
    if (!c.restrict_spec.empty()) throw DomainError("give either --restrict or --null-model, not both");
    r = lr_test(full.fit, load_model(c.null_model).fit);
  } else {
    if (c.restrict_spec.empty()) throw DomainError("test needs --restrict or --null-model");
    std::vector<std::string> names;
    std::vector<double> values;
    for (const std::string& item : split_list(c.restrict_spec)) {
      const auto eq = item.find('=');
      names.push_back(item.substr(0, eq));
      values.push_back(eq == std::string::npos ? 0.0 : parse_numbers(item.substr(eq + 1), "--restrict").at(0));
    }
    LinearHypothesis h = zero_hypothesis(full.fit, names);
    for (std::size_t k = 0; k < values.size(); ++k) h.b(static_cast<Eigen::Index>(k)) = values[k];
    r = wald_test(full.fit, h);
  }
  if (r.suspect) std::cerr << "warning: restricted fit has a higher log-likelihood than the full fit\n";
  Output out(c.model.out);
  out.stream() << test_to_json(r) << '\n';
  return 0;
}

int cmd_score(const Config& c) {
  LoadedModel m = load_model(c.model_path);
  const Dataset data = load_data_for(m, c.model.data);
  const auto dists = fitted_distributions(m.fit, data);
  Output out(c.model.out);
  std::ostream& os = out.stream();
  os << "row,y,crps\n" << std::setprecision(17);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double s = crps(*dists[static_cast<std::size_t>(i)], data.y(i));
    total += s;
    os << i + 1 << ',' << data.y(i) << ',' << s << '\n';
  }
  (out.is_stdout() ? std::cerr : std::cout) << "total_crps," << std::setprecision(17) << total << '\n';
  return 0;
}

int cmd_rootogram(const Config& c) {
  LoadedModel m = load_model(c.model_path);
  const Dataset data = load_data_for(m, c.model.data);
  std::vector<double> breaks = parse_numbers(c.breaks, "--breaks");
  if (breaks.size() == 1) {
    const double bins = breaks[0];
    if (bins != std::floor(bins) || bins < 1) throw DomainError("--breaks needs a bin count or a list of edges");
    breaks = equal_breaks(static_cast<int>(bins));
  }
  Output out(c.model.out);
  write_rootogram_csv(out.stream(), rootogram(m.fit, data, breaks));
  return 0;
}

int cmd_simulate(const Config& c) {
  std::vector<SimSetting> settings;
  if (c.settings == "desk") {
    settings = desk_settings();
  } else {
    const std::vector<SimSetting> all = study_settings();
    if (c.settings == "all") {
      settings = all;
    } else {
      for (double id : parse_numbers(c.settings, "--settings")) {
        if (id < 0 || id >= static_cast<double>(all.size()) || id != std::floor(id)) {
          throw DomainError("setting ids run from 0 to " + std::to_string(all.size() - 1));
        }
        settings.push_back(all[static_cast<std::size_t>(id)]);
      }
    }
  }
  const std::vector<double> u_grid = c.u_grid.empty() ? study_u_grid() : parse_numbers(c.u_grid, "--u-grid");
  SimOptions o;
  o.replications = c.replications;
  o.n = c.n;
  o.seed0 = c.seed;
  o.threads = c.model.threads;
  const std::vector<SimResult> results = run_comparison(settings, u_grid, o);
  const std::string prefix = c.model.out.empty() || c.model.out == "-" ? "" : c.model.out;
  if (prefix.empty()) {
    write_results_csv(std::cout, results);
    return 0;
  }
  Output raw(prefix + ".csv");
  write_results_csv(raw.stream(), results);
  Output summary(prefix + "_summary.csv");
  write_summary_csv(summary.stream(), summarize(results));
  return 0;
}

int cmd_quadcheck(const Config& c) {
  const QuadratureRule r = gauss_laguerre(c.order);
  Output out(c.model.out);
  std::ostream& os = out.stream();
  os << "index,node,weight,log_weight\n" << std::setprecision(17);
  for (int k = 0; k < r.order; ++k) {
    const auto i = static_cast<std::size_t>(k);
    os << k + 1 << ',' << r.nodes[i] << ',' << r.weights[i] << ',' << r.log_weights[i] << '\n';
  }
  return 0;
}

void add_model_options(CLI::App* app, ModelArgs& m) {
  app->add_option("--data", m.data, "input CSV")->required();
  app->add_option("--response", m.response, "response column")->required();
  app->add_option("--mean", m.mean, "mean model terms, comma-separated; a:b for interactions");
  app->add_option("--precision", m.precision, "precision (or scale) model terms");
  app->add_option("--family", m.family, "xbx, xb, beta, cn or normal")->capture_default_str();
  app->add_option("--link-mean", m.link_mean, "logit, probit, cloglog, identity");
  app->add_option("--link-precision", m.link_precision, "log or identity");
  app->add_option("--range", m.range, "response range a,b")->capture_default_str();
  app->add_option("--factors", m.factors, "columns to expand into indicators");
  app->add_option("--quad-order", m.quad_order, "Gauss-Laguerre nodes for xbx")->capture_default_str();
  app->add_option("--u", m.u, "exceedance for the xb family or rescaling for beta");
  app->add_option("--nu", m.nu, "hold nu fixed (xbx)");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Extended-support beta mixture regression"};
  app.require_subcommand(1);
  Config c;
  ModelArgs& m = c.model;

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model and write its JSON description");
  add_model_options(fit_cmd, m);

  CLI::App* predict_cmd = app.add_subcommand("predict", "predictions from a fitted model");
  predict_cmd->add_option("--model", c.model_path, "model JSON")->required();
  predict_cmd->add_option("--data", m.data, "input CSV")->required();
  predict_cmd->add_option("--targets", c.targets, "mean and/or params")->capture_default_str();
  predict_cmd->add_option("--p-above", c.p_above, "thresholds t for P(Y > t)");
  predict_cmd->add_option("--p-below", c.p_below, "thresholds t for P(Y < t)");
  predict_cmd->add_option("--cdf-at", c.cdf_at, "points t for P(Y <= t)");

  CLI::App* test_cmd = app.add_subcommand("test", "Wald or likelihood ratio test");
  test_cmd->add_option("--model", c.model_path, "full model JSON")->required();
  test_cmd->add_option("--restrict", c.restrict_spec, "coefficients name[=value],... for a Wald test");
  test_cmd->add_option("--null-model", c.null_model, "restricted model JSON for a likelihood ratio test");

  CLI::App* score_cmd = app.add_subcommand("score", "per-row CRPS of a fitted model");
  score_cmd->add_option("--model", c.model_path, "model JSON")->required();
  score_cmd->add_option("--data", m.data, "input CSV")->required();

  CLI::App* root_cmd = app.add_subcommand("rootogram", "observed and expected bin frequencies");
  root_cmd->add_option("--model", c.model_path, "model JSON")->required();
  root_cmd->add_option("--data", m.data, "input CSV")->required();
  root_cmd->add_option("--breaks", c.breaks, "bin count or comma-separated edges")->capture_default_str();

  CLI::App* sim_cmd = app.add_subcommand("simulate", "XBX versus censored normal simulation study");
  sim_cmd->add_option("--settings", c.settings, "desk, all, or setting ids")->capture_default_str();
  sim_cmd->add_option("--u-grid", c.u_grid, "exceedance values (default 2^-6 ... 2)");
  sim_cmd->add_option("--replications", c.replications)->capture_default_str();
  sim_cmd->add_option("--n", c.n, "sample size")->capture_default_str();
  sim_cmd->add_option("--seed", c.seed)->capture_default_str();

  CLI::App* quad_cmd = app.add_subcommand("quadcheck", "Gauss-Laguerre nodes and weights");
  quad_cmd->add_option("--order", c.order)->capture_default_str();

  for (CLI::App* sub : {fit_cmd, predict_cmd, test_cmd, score_cmd, root_cmd, sim_cmd, quad_cmd}) {
    sub->add_option("--out", m.out, "output path (default stdout)");
  }
  for (CLI::App* sub : {fit_cmd, sim_cmd}) sub->add_option("--threads", m.threads)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(c);
    if (*predict_cmd) return cmd_predict(c);
    if (*test_cmd) return cmd_test(c);
    if (*score_cmd) return cmd_score(c);
    if (*root_cmd) return cmd_rootogram(c);
    if (*sim_cmd) return cmd_simulate(c);
    return cmd_quadcheck(c);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const FitError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return kConvergence;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return kConvergence;
  } catch (const ShapeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace xbx::cli
