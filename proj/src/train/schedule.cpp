#include "dimasr/train/schedule.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::train {

std::size_t warmup_steps(std::size_t total_steps, double warmup_ratio) {
  if (total_steps == 0) return 0;
  const double exact = warmup_ratio * static_cast<double>(total_steps);
  const auto steps = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  // Leave at least one update at the peak; otherwise a single-step run
  // would train with a zero learning rate.
  return std::min(steps, total_steps - 1);
}

double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& config) {
  if (total_steps == 0) throw UsageError("lr_at: total_steps must be positive");
  if (step > total_steps) throw UsageError(fmt::format("lr_at: step {} beyond total {}", step, total_steps));
  const std::size_t warm = warmup_steps(total_steps, config.warmup_ratio);
  const double peak = config.learning_rate;
  if (step < warm) return peak * static_cast<double>(step) / static_cast<double>(warm);
  const std::size_t decay_span = std::max<std::size_t>(1, total_steps - warm);
  return peak * static_cast<double>(total_steps - step) / static_cast<double>(decay_span);
}

}  // namespace dimasr::train
