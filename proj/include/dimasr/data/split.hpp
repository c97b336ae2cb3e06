#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dimasr/data/dataset.hpp"

namespace dimasr::data {

/// Two disjoint sides of an instance set. Splits are made over sentence ids,
/// so all aspects of one sentence land on the same side.
struct DatasetSplit {
  std::vector<AspectInstance> train;
  std::vector<AspectInstance> eval;
  std::uint64_t seed = 0;
  /// Fraction of sentences on the train side.
  double ratio = 0.0;
};

/// Development protocol: `ratio` of the distinct sentences (rounded, and
/// clamped so both sides are non-empty) go to train, the rest to eval.
/// Depends only on the set of sentence ids, the seed and the ratio; within a
/// side, instances keep input order. Throws UsageError for a ratio outside
/// (0, 1) and DataError for fewer than two distinct sentences.
DatasetSplit split_dev_protocol(std::span<const AspectInstance> instances, double ratio = 0.8,
                                std::uint64_t seed = 42);

/// Submission protocol: concatenates train and dev, then holds out
/// `holdout_fraction` of the merged sentences for validation. The result's
/// `train` is the fit set and `eval` the holdout. Throws DataError if a
/// sentence id appears in both inputs and UsageError for a fraction outside
/// (0, 1).
DatasetSplit merge_and_hold_out(std::span<const AspectInstance> train, std::span<const AspectInstance> dev,
                                double holdout_fraction = 0.1, std::uint64_t seed = 42);

/// Distinct sentence ids in first-seen order.
std::vector<std::string> sentence_ids(std::span<const AspectInstance> instances);

}  // namespace dimasr::data
