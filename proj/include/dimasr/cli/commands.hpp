#pragma once

#include <iosfwd>
#include <span>
#include <string_view>

#include "dimasr/cli/settings.hpp"
#include "dimasr/model/model.hpp"
#include "dimasr/train/config.hpp"

namespace dimasr::cli {

/// Config sections a command reads; run-wide keys (seed, out) always apply.
std::span<const std::string_view> sections_for(std::string_view command);

train::TrainConfig train_config(const Settings& settings);
model::DimASRModel build_model(const Settings& settings, const train::TrainConfig& config);

/// Each command reads everything from `settings`, writes into the "out"
/// directory (ending with manifest.json) and reports progress on `log`.
/// Errors surface as UsageError, DataError or RuntimeFailure.
void cmd_prepare(const Settings& settings, std::ostream& log);
void cmd_train(const Settings& settings, std::ostream& log);
/// Trains every train.datasets entry into out/<name>/. Throws RuntimeFailure
/// after the summary if any dataset failed.
void cmd_train_all(const Settings& settings, std::ostream& log);
void print_train_config(const Settings& settings, std::ostream& out);
void cmd_predict(const Settings& settings, std::ostream& log);
void cmd_evaluate(const Settings& settings, std::ostream& log);
void cmd_llm_baseline(const Settings& settings, std::ostream& log);
void cmd_compare(const Settings& settings, std::ostream& log);

/// Parses argv, runs the chosen command and returns the process exit code:
/// 0 success, 1 usage or config error, 2 data error, 3 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dimasr::cli
