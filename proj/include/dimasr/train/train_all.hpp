#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dimasr/train/trainer.hpp"

namespace dimasr::train {

struct JobOutput {
  TrainHistory history;
  std::filesystem::path checkpoint;
};

struct JobResult {
  std::string name;
  std::optional<JobOutput> output;
  std::string error;

  bool ok() const { return output.has_value(); }
};

/// Runs one independent job per name. A job that throws is recorded as a
/// failure and the rest still run. Results follow the input order.
/// `parallelism` > 1 runs that many jobs at a time; jobs share nothing.
std::vector<JobResult> train_all(const std::vector<std::string>& names,
                                 const std::function<JobOutput(const std::string&)>& run_one,
                                 unsigned parallelism = 1);

std::string format_train_all_summary(const std::vector<JobResult>& results);

}  // namespace dimasr::train
