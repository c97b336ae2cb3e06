#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dimasr/data/instance_io.hpp"
#include "dimasr/data/va_pair.hpp"

namespace dimasr::metrics {

using data::VAPair;

/// sqrt( (1/N) * sum[(Vp - Vg)^2 + (Ap - Ag)^2] ). Throws UsageError on a
/// length mismatch or empty input.
double rmse_va(std::span<const VAPair> preds, std::span<const VAPair> golds);

struct DimensionRmse {
  double valence = 0.0;
  double arousal = 0.0;
};
DimensionRmse rmse_per_dimension(std::span<const VAPair> preds, std::span<const VAPair> golds);

/// Euclidean distance between each predicted and gold point, in order.
std::vector<double> per_instance_errors(std::span<const VAPair> preds, std::span<const VAPair> golds);

struct ErrorDistribution {
  double median = 0.0;
  double frac_below_1 = 0.0;  // errors < 1.0
  double frac_above_2 = 0.0;  // errors > 2.0
};
/// Median uses the mean of the central pair for even counts.
ErrorDistribution error_distribution(std::span<const double> errors);

struct HeatmapCell {
  std::optional<double> rmse;
  std::size_t count = 0;
  double sum_squared_error = 0.0;
};

/// Per-bin RMSE_VA over gold coordinates. Bins are [e_i, e_{i+1}) except
/// the last, which is closed. cells[v * (a_edges.size() - 1) + a].
struct HeatmapGrid {
  std::vector<double> v_edges;
  std::vector<double> a_edges;
  std::vector<HeatmapCell> cells;

  std::size_t v_bins() const { return v_edges.size() - 1; }
  std::size_t a_bins() const { return a_edges.size() - 1; }
  const HeatmapCell& at(std::size_t v_bin, std::size_t a_bin) const { return cells[v_bin * a_bins() + a_bin]; }
};

inline const std::vector<double> kDefaultEdges = {1.0, 3.0, 5.0, 7.0, 9.0};

/// Throws UsageError if edges are not strictly ascending, have fewer than two
/// entries, or do not span [1, 9].
HeatmapGrid va_heatmap(std::span<const VAPair> preds, std::span<const VAPair> golds,
                       std::span<const double> v_edges = kDefaultEdges,
                       std::span<const double> a_edges = kDefaultEdges);

/// Index of the bin holding `value` under the left-closed convention.
std::size_t bin_index(std::span<const double> edges, double value);

struct EvalReport {
  double rmse_va = 0.0;
  double rmse_v = 0.0;
  double rmse_a = 0.0;
  std::size_t n = 0;
  double error_median = 0.0;
  double frac_below_1 = 0.0;
  double frac_above_2 = 0.0;
};

EvalReport evaluate(std::span<const VAPair> preds, std::span<const VAPair> golds);

/// Gold and prediction values aligned by (sentence_id, aspect_index), in gold
/// order.
struct AlignedPairs {
  std::vector<data::AspectInstance> gold_instances;
  std::vector<VAPair> golds;
  std::vector<VAPair> preds;
};

/// Throws DataError listing missing predictions, predictions for unknown
/// instances, or gold instances without labels. Duplicate predictions are
/// rejected when the prediction file is read.
AlignedPairs align(std::span<const data::AspectInstance> gold, std::span<const data::Prediction> preds);

struct ScoredFiles {
  EvalReport report;
  HeatmapGrid heatmap;
  AlignedPairs pairs;
};

ScoredFiles score_files(const std::filesystem::path& gold_path, const std::filesystem::path& pred_path,
                        data::GoldFormat gold_format = data::GoldFormat::auto_detect,
                        std::span<const double> v_edges = kDefaultEdges,
                        std::span<const double> a_edges = kDefaultEdges);

}  // namespace dimasr::metrics
