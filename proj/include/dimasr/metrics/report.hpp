#pragma once

#include <string>

#include "dimasr/common/json_lines.hpp"
#include "dimasr/metrics/metrics.hpp"

namespace dimasr::metrics {

/// Machine-readable report: every EvalReport field plus the heatmap grid.
/// Empty cells carry "rmse": null.
OrderedJson report_to_json(const EvalReport& report, const HeatmapGrid& heatmap);

/// Reads back the summary fields of a document written by report_to_json.
EvalReport report_from_json(const Json& doc);

/// Plain-text summary: an RMSE block, the error distribution row and the
/// heatmap as "rmse (n)" cells with valence bins as rows.
std::string format_report_text(const EvalReport& report, const HeatmapGrid& heatmap);

}  // namespace dimasr::metrics
