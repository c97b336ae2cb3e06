#pragma once

#include <filesystem>
#include <optional>

#include "dimasr/model/model.hpp"

namespace dimasr::model {

inline constexpr int kCheckpointVersion = 1;

/// Writes a checkpoint directory:
///   checkpoint.json     manifest (version, dims, dropout rates, seed, encoder)
///   weights.safetensors every parameter, F64
///   tokenizer.json      only for pretrained encoders
void save_checkpoint(const DimASRModel& model, const std::filesystem::path& dir);

/// Rebuilds a model from save_checkpoint output. Throws DataError for a
/// missing directory, a version mismatch, or (when `expected_hidden_dim` is
/// given) a hidden size that differs from the expectation.
DimASRModel load_checkpoint(const std::filesystem::path& dir, std::optional<int> expected_hidden_dim = std::nullopt);

}  // namespace dimasr::model
