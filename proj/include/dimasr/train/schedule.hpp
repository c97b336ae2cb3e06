#pragma once

#include <cstddef>

#include "dimasr/train/config.hpp"

namespace dimasr::train {

/// ceil(warmup_ratio * total_steps), immune to representation error such as
/// 0.1 * 30 = 3.0000000000000004, and capped at total_steps - 1.
std::size_t warmup_steps(std::size_t total_steps, double warmup_ratio);

/// Linear ramp from 0 to the peak over the warmup steps, then linear decay to
/// 0 at `total_steps`. The optimizer update with index k (from 0) uses
/// lr_at(k).
double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& config);

}  // namespace dimasr::train
