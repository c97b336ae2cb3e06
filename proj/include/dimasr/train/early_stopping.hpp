#pragma once

#include <limits>

namespace dimasr::train {

/// Patience counter on a lower-is-better metric. An epoch improves only if
/// its value is strictly below best - min_delta; NaN never improves.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience, double min_delta = 0.0);

  /// Records the metric for `epoch` (1-based); returns true on improvement.
  bool update(int epoch, double value);
  bool should_stop() const { return since_best_ >= patience_; }

  int best_epoch() const { return best_epoch_; }
  double best_value() const { return best_; }

 private:
  int patience_;
  double min_delta_;
  double best_ = std::numeric_limits<double>::infinity();
  int best_epoch_ = 0;
  int since_best_ = 0;
};

}  // namespace dimasr::train
