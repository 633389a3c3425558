#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "xbx/infer.hpp"
#include "xbx/model.hpp"

namespace xbx {

/// Raw CSV table: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws DataError when the column is absent.
  std::size_t column(const std::string& name) const;
};

/// Comma-separated, header row, double quotes for fields with commas.
/// Throws DataError on ragged rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// How a CSV table becomes a Dataset. Terms are column names, or products of
/// columns written "a:b". Columns listed in `factors` are expanded into
/// indicator columns for every level except the first (in sorted order).
struct DesignSpec {
  std::string response;
  std::vector<std::string> mean_terms;
  std::vector<std::string> precision_terms;
  double range_lower = 0.0;
  double range_upper = 1.0;
  std::vector<std::string> factors;
  /// Levels of each factor; filled in from the data when absent, so that a
  /// stored spec reproduces the same coding on new data.
  std::map<std::string, std::vector<std::string>> levels;
};

/// y = (y' - a) / (b - a), with y' equal to a or b mapped to exactly 0 or 1.
/// An intercept column is prepended to both designs. Throws DataError for
/// missing or unparseable cells (reporting row and column) and responses
/// outside [a, b]. `spec.levels` is completed with the levels seen.
Dataset build_dataset(const CsvTable& table, DesignSpec& spec);
Dataset ingest_csv(const std::string& path, DesignSpec& spec);

/// "a,b,c" -> {"a", "b", "c"}; empty string -> {}.
std::vector<std::string> split_list(const std::string& s, char sep = ',');

/// FitResult plus the design recipe that produced it, as JSON text.
std::string fit_to_json(const FitResult& fit, const DesignSpec* design = nullptr);
/// Inverse of fit_to_json. Throws DataError on malformed documents.
FitResult fit_from_json(const std::string& text, DesignSpec* design = nullptr);

std::string test_to_json(const TestResult& t);

}  // namespace xbx
