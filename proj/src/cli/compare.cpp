#include "dimasr/cli/compare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dimasr/common/error.hpp"
#include "dimasr/metrics/report.hpp"

namespace dimasr::cli {

namespace {

std::size_t index_of(std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  names.push_back(name);
  return names.size() - 1;
}

long long displayed(double v) { return std::llround(v * 1e4); }

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

ComparisonTable build_comparison(std::span<const ComparisonEntry> entries) {
  if (entries.empty()) throw UsageError("compare needs at least one report");
  ComparisonTable t;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  for (const auto& e : entries) {
    if (!std::isfinite(e.value)) {
      throw DataError(fmt::format("{} on {}: score is not a finite number", e.method, e.dataset));
    }
    const auto m = index_of(t.methods, e.method);
    const auto d = index_of(t.datasets, e.dataset);
    if (!cells.emplace(std::pair{m, d}, e.value).second) {
      throw DataError(fmt::format("two reports for {} on {}", e.method, e.dataset));
    }
  }
  std::vector<std::string> problems;
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    std::vector<std::string> missing;
    for (std::size_t d = 0; d < t.datasets.size(); ++d) {
      if (!cells.contains({m, d})) missing.push_back(t.datasets[d]);
    }
    if (!missing.empty()) problems.push_back(fmt::format("{} lacks {}", t.methods[m], join(missing)));
  }
  if (!problems.empty()) {
    throw DataError(fmt::format("reports cover different dataset sets: {}", fmt::join(problems, "; ")));
  }

  t.values.assign(t.methods.size(), std::vector<double>(t.datasets.size()));
  t.best.assign(t.methods.size(), std::vector<bool>(t.datasets.size(), false));
  t.tied.assign(t.datasets.size(), false);
  for (const auto& [key, v] : cells) t.values[key.first][key.second] = v;
  for (std::size_t d = 0; d < t.datasets.size(); ++d) {
    long long low = displayed(t.values[0][d]);
    for (std::size_t m = 1; m < t.methods.size(); ++m) low = std::min(low, displayed(t.values[m][d]));
    std::size_t count = 0;
    for (std::size_t m = 0; m < t.methods.size(); ++m) {
      if (displayed(t.values[m][d]) == low) {
        t.best[m][d] = true;
        ++count;
      }
    }
    t.tied[d] = count > 1;
  }
  return t;
}

std::string format_comparison(const ComparisonTable& t, std::string_view metric) {
  std::size_t first = std::string_view("Method").size();
  for (const auto& m : t.methods) first = std::max(first, m.size());
  std::vector<std::size_t> widths;
  for (const auto& d : t.datasets) widths.push_back(std::max<std::size_t>(d.size(), 7));

  std::string out = fmt::format("{} (lower is better)\n", metric);
  out += fmt::format("{:<{}}", "Method", first);
  for (std::size_t d = 0; d < t.datasets.size(); ++d) out += fmt::format("  {:>{}} ", t.datasets[d], widths[d]);
  out += "\n";
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    out += fmt::format("{:<{}}", t.methods[m], first);
    for (std::size_t d = 0; d < t.datasets.size(); ++d) {
      const char mark = !t.best[m][d] ? ' ' : (t.tied[d] ? '=' : '*');
      out += fmt::format("  {:>{}.4f}{}", t.values[m][d], widths[d], mark);
    }
    out += "\n";
  }
  out += "* best in column   = tied for best\n";
  return out;
}

OrderedJson comparison_to_json(const ComparisonTable& t, std::string_view metric) {
  OrderedJson j;
  j["metric"] = metric;
  j["datasets"] = t.datasets;
  OrderedJson rows = OrderedJson::array();
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    OrderedJson scores = OrderedJson::object();
    for (std::size_t d = 0; d < t.datasets.size(); ++d) scores[t.datasets[d]] = t.values[m][d];
    rows.push_back({{"method", t.methods[m]}, {"scores", std::move(scores)}});
  }
  j["methods"] = std::move(rows);
  OrderedJson best = OrderedJson::object();
  for (std::size_t d = 0; d < t.datasets.size(); ++d) {
    OrderedJson winners = OrderedJson::array();
    for (std::size_t m = 0; m < t.methods.size(); ++m) {
      if (t.best[m][d]) winners.push_back(t.methods[m]);
    }
    best[t.datasets[d]] = std::move(winners);
  }
  j["best"] = std::move(best);
  return j;
}

std::pair<std::string, std::string> parse_report_label(std::string_view label) {
  const auto colon = label.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == label.size()) {
    throw UsageError(fmt::format("report label must be METHOD:DATASET, got '{}'", label));
  }
  return {std::string(label.substr(0, colon)), std::string(label.substr(colon + 1))};
}

double read_report_metric(const std::filesystem::path& path, std::string_view metric) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw DataError(fmt::format("{}: not JSON: {}", path.string(), e.what()));
  }
  const auto report = metrics::report_from_json(doc);
  if (metric == "rmse_va") return report.rmse_va;
  if (metric == "rmse_v") return report.rmse_v;
  if (metric == "rmse_a") return report.rmse_a;
  throw UsageError(fmt::format("unknown metric '{}'; use rmse_va, rmse_v or rmse_a", metric));
}

}  // namespace dimasr::cli
