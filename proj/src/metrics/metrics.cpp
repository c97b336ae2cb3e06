#include "dimasr/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::metrics {

namespace {

void check_pairing(std::span<const VAPair> preds, std::span<const VAPair> golds) {
  if (preds.size() != golds.size()) {
    throw UsageError(fmt::format("prediction count {} does not match gold count {}", preds.size(), golds.size()));
  }
  if (preds.empty()) throw UsageError("cannot score an empty set");
}

double squared_error(const VAPair& p, const VAPair& g) {
  const double dv = p.valence() - g.valence();
  const double da = p.arousal() - g.arousal();
  return dv * dv + da * da;
}

}  // namespace

double rmse_va(std::span<const VAPair> preds, std::span<const VAPair> golds) {
  check_pairing(preds, golds);
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) total += squared_error(preds[i], golds[i]);
  return std::sqrt(total / static_cast<double>(preds.size()));
}

DimensionRmse rmse_per_dimension(std::span<const VAPair> preds, std::span<const VAPair> golds) {
  check_pairing(preds, golds);
  double sv = 0.0;
  double sa = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double dv = preds[i].valence() - golds[i].valence();
    const double da = preds[i].arousal() - golds[i].arousal();
    sv += dv * dv;
    sa += da * da;
  }
  const auto n = static_cast<double>(preds.size());
  return {std::sqrt(sv / n), std::sqrt(sa / n)};
}

std::vector<double> per_instance_errors(std::span<const VAPair> preds, std::span<const VAPair> golds) {
  if (preds.size() != golds.size()) {
    throw UsageError(fmt::format("prediction count {} does not match gold count {}", preds.size(), golds.size()));
  }
  std::vector<double> errors(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) errors[i] = std::sqrt(squared_error(preds[i], golds[i]));
  return errors;
}

ErrorDistribution error_distribution(std::span<const double> errors) {
  if (errors.empty()) throw UsageError("error distribution of an empty list");
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  ErrorDistribution out;
  out.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const auto below = std::count_if(sorted.begin(), sorted.end(), [](double e) { return e < 1.0; });
  const auto above = std::count_if(sorted.begin(), sorted.end(), [](double e) { return e > 2.0; });
  out.frac_below_1 = static_cast<double>(below) / static_cast<double>(n);
  out.frac_above_2 = static_cast<double>(above) / static_cast<double>(n);
  return out;
}

std::size_t bin_index(std::span<const double> edges, double value) {
  const std::size_t bins = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  const auto index = static_cast<std::size_t>(std::distance(edges.begin(), it));
  if (index == 0) return 0;
  return std::min(index - 1, bins - 1);
}

namespace {

void check_edges(std::span<const double> edges, std::string_view axis) {
  if (edges.size() < 2) throw UsageError(fmt::format("{} edges need at least two values", axis));
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw UsageError(fmt::format("{} edges must be strictly ascending", axis));
    }
  }
  if (edges.front() > data::kMinScore || edges.back() < data::kMaxScore) {
    throw UsageError(fmt::format("{} edges must span [1, 9], got [{}, {}]", axis, edges.front(), edges.back()));
  }
}

}  // namespace

HeatmapGrid va_heatmap(std::span<const VAPair> preds, std::span<const VAPair> golds, std::span<const double> v_edges,
                       std::span<const double> a_edges) {
  if (preds.size() != golds.size()) {
    throw UsageError(fmt::format("prediction count {} does not match gold count {}", preds.size(), golds.size()));
  }
  check_edges(v_edges, "valence");
  check_edges(a_edges, "arousal");
  HeatmapGrid grid;
  grid.v_edges.assign(v_edges.begin(), v_edges.end());
  grid.a_edges.assign(a_edges.begin(), a_edges.end());
  grid.cells.assign(grid.v_bins() * grid.a_bins(), HeatmapCell{});
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::size_t v = bin_index(v_edges, golds[i].valence());
    const std::size_t a = bin_index(a_edges, golds[i].arousal());
    HeatmapCell& cell = grid.cells[v * grid.a_bins() + a];
    ++cell.count;
    cell.sum_squared_error += squared_error(preds[i], golds[i]);
  }
  for (auto& cell : grid.cells) {
    if (cell.count > 0) cell.rmse = std::sqrt(cell.sum_squared_error / static_cast<double>(cell.count));
  }
  return grid;
}

EvalReport evaluate(std::span<const VAPair> preds, std::span<const VAPair> golds) {
  EvalReport report;
  report.rmse_va = rmse_va(preds, golds);
  const auto dims = rmse_per_dimension(preds, golds);
  report.rmse_v = dims.valence;
  report.rmse_a = dims.arousal;
  report.n = preds.size();
  const auto errors = per_instance_errors(preds, golds);
  const auto dist = error_distribution(errors);
  report.error_median = dist.median;
  report.frac_below_1 = dist.frac_below_1;
  report.frac_above_2 = dist.frac_above_2;
  return report;
}

AlignedPairs align(std::span<const data::AspectInstance> gold, std::span<const data::Prediction> preds) {
  using Key = std::pair<std::string, std::size_t>;
  std::map<Key, const data::Prediction*> by_key;
  for (const auto& p : preds) {
    if (!by_key.emplace(Key{p.sentence_id, p.aspect_index}, &p).second) {
      throw DataError(fmt::format("duplicate prediction for '{}' aspect_index {}", p.sentence_id, p.aspect_index));
    }
  }
  AlignedPairs out;
  std::vector<std::string> missing;
  std::vector<std::string> unlabeled;
  for (const auto& g : gold) {
    const auto it = by_key.find(Key{g.sentence_id, g.aspect_index});
    if (it == by_key.end()) {
      missing.push_back(fmt::format("{}#{}", g.sentence_id, g.aspect_index));
      continue;
    }
    if (!g.gold) {
      unlabeled.push_back(fmt::format("{}#{}", g.sentence_id, g.aspect_index));
      continue;
    }
    out.gold_instances.push_back(g);
    out.golds.push_back(*g.gold);
    out.preds.push_back(it->second->va);
    by_key.erase(it);
  }
  auto list = [](const std::vector<std::string>& ids) {
    constexpr std::size_t kShown = 20;
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > kShown) s += fmt::format(", ... ({} total)", ids.size());
    return s;
  };
  if (!missing.empty()) throw DataError(fmt::format("missing predictions for: {}", list(missing)));
  if (!unlabeled.empty()) throw DataError(fmt::format("gold instances without labels: {}", list(unlabeled)));
  if (!by_key.empty()) {
    std::vector<std::string> extra;
    for (const auto& [key, p] : by_key) extra.push_back(fmt::format("{}#{}", key.first, key.second));
    throw DataError(fmt::format("predictions for unknown instances: {}", list(extra)));
  }
  if (out.golds.empty()) throw DataError("no gold instances to score");
  return out;
}

ScoredFiles score_files(const std::filesystem::path& gold_path, const std::filesystem::path& pred_path,
                        data::GoldFormat gold_format, std::span<const double> v_edges,
                        std::span<const double> a_edges) {
  const auto gold = data::load_labeled_instances(gold_path, gold_format);
  const auto preds = data::read_predictions(pred_path);
  ScoredFiles out;
  out.pairs = align(gold, preds);
  out.report = evaluate(out.pairs.preds, out.pairs.golds);
  out.heatmap = va_heatmap(out.pairs.preds, out.pairs.golds, v_edges, a_edges);
  return out;
}

}  // namespace dimasr::metrics
