#include "dimasr/train/early_stopping.hpp"

#include "dimasr/common/error.hpp"

namespace dimasr::train {

EarlyStopping::EarlyStopping(int patience, double min_delta) : patience_(patience), min_delta_(min_delta) {
  if (patience <= 0) throw UsageError("patience must be positive");
  if (min_delta < 0.0) throw UsageError("min_delta must be non-negative");
}

bool EarlyStopping::update(int epoch, double value) {
  if (best_epoch_ == 0 ? value == value : value < best_ - min_delta_) {
    best_ = value;
    best_epoch_ = epoch;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

}  // namespace dimasr::train
