#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimasr/common/json_lines.hpp"

namespace dimasr::cli {

/// One score: a method evaluated on a dataset.
struct ComparisonEntry {
  std::string method;
  std::string dataset;
  double value = 0.0;
};

/// Methods as rows, datasets as columns, both in first-seen order.
struct ComparisonTable {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> values;  // [method][dataset]
  std::vector<std::vector<bool>> best;      // lowest in its column
  std::vector<bool> tied;                   // column has more than one best
};

/// Values compare at the four decimals the table shows, so two entries that
/// print the same are tied. Throws DataError for a repeated (method, dataset)
/// pair or when methods cover different dataset sets.
ComparisonTable build_comparison(std::span<const ComparisonEntry> entries);

/// Aligned text table. "*" marks the best value in a column, "=" a value
/// tied for best.
std::string format_comparison(const ComparisonTable& table, std::string_view metric);

OrderedJson comparison_to_json(const ComparisonTable& table, std::string_view metric);

/// Splits "METHOD:DATASET" (the label of a compare.reports entry).
std::pair<std::string, std::string> parse_report_label(std::string_view label);

/// Reads `metric` (rmse_va, rmse_v or rmse_a) from a report.json.
double read_report_metric(const std::filesystem::path& path, std::string_view metric);

}  // namespace dimasr::cli
