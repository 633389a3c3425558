#include "xbx/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "xbx/errors.hpp"

namespace xbx {

using nlohmann::json;

namespace {

std::vector<std::string> parse_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string where(std::size_t row, const std::string& col) {
  return "row " + std::to_string(row + 1) + ", column '" + col + "'";
}

bool missing(const std::string& s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan"; }

double parse_number(const std::string& s, std::size_t row, const std::string& col) {
  if (missing(s)) throw DataError("missing value at " + where(row, col));
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw DataError("cannot parse '" + s + "' as a number at " + where(row, col));
  }
  return v;
}

// One expanded model column.
struct Column {
  std::string name;
  Eigen::VectorXd values;
};

std::vector<Column> expand_variable(const CsvTable& t, const std::string& name, DesignSpec& spec) {
  const std::size_t j = t.column(name);
  const std::size_t n = t.rows.size();
  if (std::find(spec.factors.begin(), spec.factors.end(), name) == spec.factors.end()) {
    Column c{name, Eigen::VectorXd(static_cast<Eigen::Index>(n))};
    for (std::size_t i = 0; i < n; ++i) c.values(static_cast<Eigen::Index>(i)) = parse_number(t.rows[i][j], i, name);
    return {c};
  }
  auto& levels = spec.levels[name];
  if (levels.empty()) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
      if (missing(t.rows[i][j])) throw DataError("missing value at " + where(i, name));
      seen.insert(t.rows[i][j]);
    }
    levels.assign(seen.begin(), seen.end());
  }
  std::vector<Column> out;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    out.push_back({name + levels[k], Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& v = t.rows[i][j];
    if (missing(v)) throw DataError("missing value at " + where(i, name));
    const auto it = std::find(levels.begin(), levels.end(), v);
    if (it == levels.end()) throw DataError("unknown level '" + v + "' at " + where(i, name));
    const auto k = static_cast<std::size_t>(it - levels.begin());
    if (k > 0) out[k - 1].values(static_cast<Eigen::Index>(i)) = 1.0;
  }
  return out;
}

std::vector<Column> expand_term(const CsvTable& t, const std::string& term, DesignSpec& spec) {
  std::vector<Column> acc;
  for (const std::string& var : split_list(term, ':')) {
    std::vector<Column> cols = expand_variable(t, var, spec);
    if (acc.empty()) {
      acc = std::move(cols);
      continue;
    }
    std::vector<Column> next;
    for (const Column& a : acc) {
      for (const Column& b : cols) next.push_back({a.name + ":" + b.name, a.values.cwiseProduct(b.values)});
    }
    acc = std::move(next);
  }
  return acc;
}

Eigen::MatrixXd design_matrix(const CsvTable& t, const std::vector<std::string>& terms, DesignSpec& spec,
                              std::vector<std::string>& names) {
  std::vector<Column> cols;
  cols.push_back({"(Intercept)", Eigen::VectorXd::Ones(static_cast<Eigen::Index>(t.rows.size()))});
  for (const std::string& term : terms) {
    for (Column& c : expand_term(t, term, spec)) cols.push_back(std::move(c));
  }
  Eigen::MatrixXd M(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
  names.clear();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    M.col(static_cast<Eigen::Index>(k)) = cols[k].values;
    names.push_back(cols[k].name);
  }
  return M;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("column '" + name + "' not found in input header");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = parse_line(line);
    for (auto& c : cells) c = trim(c);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw DataError("empty CSV input");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in);
}

Dataset build_dataset(const CsvTable& table, DesignSpec& spec) {
  const double a = spec.range_lower, b = spec.range_upper;
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("response range needs a < b");
  if (table.rows.empty()) throw DataError("CSV input has no data rows");
  Dataset d;
  const std::size_t jy = table.column(spec.response);
  d.y.resize(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double raw = parse_number(table.rows[i][jy], i, spec.response);
    if (raw < a || raw > b) throw DataError("response outside the range [a, b] at " + where(i, spec.response));
    d.y(static_cast<Eigen::Index>(i)) = raw == a ? 0.0 : raw == b ? 1.0 : std::clamp((raw - a) / (b - a), 0.0, 1.0);
  }
  d.X = design_matrix(table, spec.mean_terms, spec, d.x_names);
  d.Z = design_matrix(table, spec.precision_terms, spec, d.z_names);
  return d;
}

Dataset ingest_csv(const std::string& path, DesignSpec& spec) { return build_dataset(read_csv_file(path), spec); }

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fit_to_json(const FitResult& fit, const DesignSpec* design) {
  json j;
  j["family"] = family_name(fit.spec.family);
  j["links"] = {{"mean", fit.spec.mean_link.name()}, {"precision", fit.spec.precision_link.name()}};
  j["quad_order"] = fit.spec.quad_order;
  if (fit.spec.rescale_u) j["rescale_u"] = *fit.spec.rescale_u;
  if (fit.spec.family == Family::XBFixed) j["fixed_u"] = fit.spec.fixed_u;
  const std::vector<std::string> names = fit.coefficient_names();
  const Eigen::VectorXd est = fit.theta_hat.flat();
  const Eigen::VectorXd se = fit.standard_errors();
  json coefs = json::array();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    coefs.push_back({{"name", names[k]}, {"estimate", est(i)}, {"std_error", nullable(se(i))}});
  }
  j["coefficients"] = coefs;
  j["x_names"] = fit.x_names;
  j["z_names"] = fit.z_names;
  j["vcov"] = fit.vcov ? matrix_json(*fit.vcov) : json(nullptr);
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["n"] = fit.n;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = fit.gradient_norm;
  j["nu"] = fit.nu ? json(*fit.nu) : json(nullptr);
  j["xi_fixed"] = fit.xi_fixed;
  j["warnings"] = fit.warnings;
  if (design) {
    j["design"] = {{"response", design->response},
                   {"mean", design->mean_terms},
                   {"precision", design->precision_terms},
                   {"range", {design->range_lower, design->range_upper}},
                   {"factors", design->factors},
                   {"levels", design->levels}};
  }
  return j.dump(2);
}

FitResult fit_from_json(const std::string& text, DesignSpec* design) {
  try {
    const json j = json::parse(text);
    FitResult f;
    f.spec = ModelSpec::defaults(parse_family(j.at("family").get<std::string>()));
    f.spec.mean_link = LinkFunction::parse(j.at("links").at("mean").get<std::string>());
    f.spec.precision_link = LinkFunction::parse(j.at("links").at("precision").get<std::string>());
    f.spec.quad_order = j.at("quad_order").get<int>();
    if (j.contains("rescale_u")) f.spec.rescale_u = j["rescale_u"].get<double>();
    if (j.contains("fixed_u")) f.spec.fixed_u = j["fixed_u"].get<double>();
    f.x_names = j.at("x_names").get<std::vector<std::string>>();
    f.z_names = j.at("z_names").get<std::vector<std::string>>();
    const json& coefs = j.at("coefficients");
    const auto p = static_cast<Eigen::Index>(f.x_names.size());
    const auto q = static_cast<Eigen::Index>(f.z_names.size());
    const bool with_xi = f.spec.has_xi();
    if (static_cast<Eigen::Index>(coefs.size()) != p + q + (with_xi ? 1 : 0)) {
      throw DataError("coefficient count does not match the design names");
    }
    Eigen::VectorXd theta(static_cast<Eigen::Index>(coefs.size()));
    for (std::size_t k = 0; k < coefs.size(); ++k) {
      theta(static_cast<Eigen::Index>(k)) = coefs[k].at("estimate").get<double>();
    }
    f.theta_hat = ParameterVector::from_flat(theta, p, q, with_xi);
    if (!j.at("vcov").is_null()) {
      const json& v = j["vcov"];
      Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
      for (std::size_t r = 0; r < v.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = vector_from(v[r]).transpose();
      f.vcov = m;
    }
    f.loglik = j.at("loglik").get<double>();
    f.aic = j.at("aic").get<double>();
    f.bic = j.at("bic").get<double>();
    f.n = j.at("n").get<Eigen::Index>();
    f.converged = j.at("converged").get<bool>();
    f.iterations = j.at("iterations").get<int>();
    f.gradient_norm = j.value("gradient_norm", 0.0);
    if (!j.at("nu").is_null()) f.nu = j["nu"].get<double>();
    f.xi_fixed = j.value("xi_fixed", false);
    f.warnings = j.value("warnings", std::vector<std::string>{});
    if (design) {
      if (!j.contains("design")) throw DataError("model file carries no design recipe");
      const json& d = j["design"];
      design->response = d.at("response").get<std::string>();
      design->mean_terms = d.at("mean").get<std::vector<std::string>>();
      design->precision_terms = d.at("precision").get<std::vector<std::string>>();
      design->range_lower = d.at("range")[0].get<double>();
      design->range_upper = d.at("range")[1].get<double>();
      design->factors = d.at("factors").get<std::vector<std::string>>();
      design->levels = d.at("levels").get<std::map<std::string, std::vector<std::string>>>();
    }
    return f;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

std::string test_to_json(const TestResult& t) {
  json j{{"statistic", t.statistic}, {"df", t.df}, {"p_value", t.p_value}};
  if (t.suspect) j["suspect"] = true;
  return j.dump(2);
}

}  // namespace xbx
