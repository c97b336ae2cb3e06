#pragma once

#include <cstdint>

#include "dimasr/common/json_lines.hpp"

namespace dimasr::train {

/// Fine-tuning hyperparameters. Defaults are the published settings; the
/// weight decay is not published and defaults to the usual 0.01.
struct TrainConfig {
  int batch_size = 16;
  double learning_rate = 2e-5;
  double warmup_ratio = 0.10;
  double dropout = 0.1;
  int max_epochs = 10;
  int patience = 3;
  double min_delta = 0.0;
  double grad_clip_norm = 1.0;
  std::uint64_t seed = 42;
  int max_len = 256;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  /// Throws UsageError naming the first offending field.
  void validate() const;
};

OrderedJson config_to_json(const TrainConfig& config);

}  // namespace dimasr::train
