#include "dimasr/train/config.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::train {

void TrainConfig::validate() const {
  auto require = [](bool ok, std::string_view message) {
    if (!ok) throw UsageError(fmt::format("invalid training config: {}", message));
  };
  require(batch_size > 0, "batch_size must be positive");
  require(std::isfinite(learning_rate) && learning_rate > 0.0, "learning_rate must be positive");
  require(warmup_ratio >= 0.0 && warmup_ratio < 1.0, "warmup_ratio must lie in [0, 1)");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(max_epochs > 0, "max_epochs must be positive");
  require(patience > 0, "patience must be positive");
  require(patience <= max_epochs, "patience must not exceed max_epochs");
  require(min_delta >= 0.0, "min_delta must be non-negative");
  require(std::isfinite(grad_clip_norm) && grad_clip_norm > 0.0, "grad_clip_norm must be positive");
  require(max_len > 0, "max_len must be positive");
  require(weight_decay >= 0.0, "weight_decay must be non-negative");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 must lie in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 must lie in [0, 1)");
  require(adam_eps > 0.0, "adam_eps must be positive");
}

OrderedJson config_to_json(const TrainConfig& c) {
  OrderedJson j;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["warmup_ratio"] = c.warmup_ratio;
  j["dropout"] = c.dropout;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["min_delta"] = c.min_delta;
  j["grad_clip_norm"] = c.grad_clip_norm;
  j["seed"] = c.seed;
  j["max_len"] = c.max_len;
  j["weight_decay"] = c.weight_decay;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  return j;
}

}  // namespace dimasr::train
