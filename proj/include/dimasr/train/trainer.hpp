#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dimasr/common/json_lines.hpp"
#include "dimasr/data/dataset.hpp"
#include "dimasr/model/model.hpp"
#include "dimasr/train/config.hpp"

namespace dimasr::train {

/// MSE(V) + MSE(A), each a mean over the batch. Throws UsageError on a
/// length mismatch or an empty batch.
double compute_loss(std::span<const data::VAPair> preds, std::span<const data::VAPair> golds);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_rmse_va = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
};

struct FitHooks {
  /// Replaces the computed validation score for an epoch when it returns a
  /// value. Used to drive the stopping rule with a known sequence.
  std::function<std::optional<double>(int epoch)> validation_override;
  /// Called after each epoch is scored, before any restoration.
  std::function<void(const EpochRecord&, const model::DimASRModel&)> on_epoch_end;
  std::function<void(const std::string&)> log;
};

/// Trains `model` in place and leaves it holding the best-epoch parameters.
/// Throws DataError if an instance lacks gold or the validation set is
/// empty, and RuntimeFailure on a non-finite loss.
TrainHistory fit(model::DimASRModel& model, std::span<const data::AspectInstance> fit_set,
                 std::span<const data::AspectInstance> val_set, const TrainConfig& config,
                 const FitHooks& hooks = {});

std::size_t steps_per_epoch(std::size_t instances, int batch_size);

OrderedJson history_to_json(const TrainHistory& history);
TrainHistory history_from_json(const Json& doc);
/// Tab-separated "epoch  train_loss  val_rmse_va" table with a header row.
std::string history_to_tsv(const TrainHistory& history);

}  // namespace dimasr::train
