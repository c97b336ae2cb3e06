#include "dimasr/metrics/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::metrics {

namespace {

std::string bin_label(const std::vector<double>& edges, std::size_t i) {
  const bool last = i + 2 == edges.size();
  return fmt::format("[{:g},{:g}{}", edges[i], edges[i + 1], last ? "]" : ")");
}

}  // namespace

OrderedJson report_to_json(const EvalReport& report, const HeatmapGrid& heatmap) {
  OrderedJson doc;
  doc["rmse_va"] = report.rmse_va;
  doc["rmse_v"] = report.rmse_v;
  doc["rmse_a"] = report.rmse_a;
  doc["n"] = report.n;
  doc["error_median"] = report.error_median;
  doc["frac_below_1"] = report.frac_below_1;
  doc["frac_above_2"] = report.frac_above_2;

  OrderedJson grid;
  grid["binning"] = "gold coordinates; bins left-closed, last bin closed; default 4x4 edges are a chosen granularity";
  grid["v_edges"] = heatmap.v_edges;
  grid["a_edges"] = heatmap.a_edges;
  OrderedJson cells = OrderedJson::array();
  for (std::size_t v = 0; v < heatmap.v_bins(); ++v) {
    for (std::size_t a = 0; a < heatmap.a_bins(); ++a) {
      const auto& cell = heatmap.at(v, a);
      OrderedJson c;
      c["v_bin"] = v;
      c["a_bin"] = a;
      c["count"] = cell.count;
      c["rmse"] = cell.rmse ? OrderedJson(*cell.rmse) : OrderedJson(nullptr);
      cells.push_back(std::move(c));
    }
  }
  grid["cells"] = std::move(cells);
  doc["heatmap"] = std::move(grid);
  return doc;
}

EvalReport report_from_json(const Json& doc) {
  try {
    EvalReport r;
    r.rmse_va = doc.at("rmse_va").get<double>();
    r.rmse_v = doc.at("rmse_v").get<double>();
    r.rmse_a = doc.at("rmse_a").get<double>();
    r.n = doc.at("n").get<std::size_t>();
    r.error_median = doc.at("error_median").get<double>();
    r.frac_below_1 = doc.at("frac_below_1").get<double>();
    r.frac_above_2 = doc.at("frac_above_2").get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw DataError(fmt::format("malformed report: {}", e.what()));
  }
}

std::string format_report_text(const EvalReport& report, const HeatmapGrid& heatmap) {
  std::string out;
  out += fmt::format("{:<10} {:>8} {:>8} {:>8}\n", "N", "RMSE_VA", "RMSE_V", "RMSE_A");
  out += fmt::format("{:<10} {:>8.4f} {:>8.4f} {:>8.4f}\n\n", report.n, report.rmse_va, report.rmse_v, report.rmse_a);
  out += fmt::format("{:<10} {:>8} {:>8} {:>8}\n", "Errors", "Median", "%<1.0", "%>2.0");
  out += fmt::format("{:<10} {:>8.3f} {:>8.1f} {:>8.1f}\n\n", "", report.error_median, 100.0 * report.frac_below_1,
                     100.0 * report.frac_above_2);

  constexpr int kWidth = 14;
  out += "Heatmap by gold bin, RMSE_VA (n); rows valence, columns arousal\n";
  out += fmt::format("{:<{}}", "V \\ A", kWidth);
  for (std::size_t a = 0; a < heatmap.a_bins(); ++a) out += fmt::format("{:>{}}", bin_label(heatmap.a_edges, a), kWidth);
  out += '\n';
  for (std::size_t v = heatmap.v_bins(); v-- > 0;) {
    out += fmt::format("{:<{}}", bin_label(heatmap.v_edges, v), kWidth);
    for (std::size_t a = 0; a < heatmap.a_bins(); ++a) {
      const auto& cell = heatmap.at(v, a);
      const std::string text = cell.rmse ? fmt::format("{:.3f} ({})", *cell.rmse, cell.count) : "- (0)";
      out += fmt::format("{:>{}}", text, kWidth);
    }
    out += '\n';
  }
  return out;
}

}  // namespace dimasr::metrics
