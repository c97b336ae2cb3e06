#include "dimasr/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/common/rng.hpp"

namespace dimasr::data {

std::vector<std::string> sentence_ids(std::span<const AspectInstance> instances) {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& instance : instances) {
    if (seen.insert(instance.sentence_id).second) ids.push_back(instance.sentence_id);
  }
  return ids;
}

namespace {

/// Shuffles the sorted id set and assigns the first `eval_count` ids to eval.
DatasetSplit split_by_sentence(std::span<const AspectInstance> instances, std::size_t eval_count,
                               std::uint64_t seed, double ratio) {
  std::vector<std::string> ids = sentence_ids(instances);
  std::sort(ids.begin(), ids.end());
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(std::span<std::string>(ids));

  const std::unordered_set<std::string> eval_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(eval_count));
  DatasetSplit split;
  split.seed = seed;
  split.ratio = ratio;
  for (const auto& instance : instances) {
    (eval_ids.contains(instance.sentence_id) ? split.eval : split.train).push_back(instance);
  }
  return split;
}

std::size_t clamp_count(double exact, std::size_t total) {
  const auto rounded = static_cast<std::size_t>(std::llround(exact));
  return std::clamp<std::size_t>(rounded, 1, total - 1);
}

}  // namespace

DatasetSplit split_dev_protocol(std::span<const AspectInstance> instances, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw UsageError(fmt::format("split ratio must be in (0, 1), got {}", ratio));
  }
  const std::size_t sentences = sentence_ids(instances).size();
  if (sentences < 2) {
    throw DataError(fmt::format("need at least 2 distinct sentences to split, got {}", sentences));
  }
  const std::size_t train_count = clamp_count(ratio * static_cast<double>(sentences), sentences);
  return split_by_sentence(instances, sentences - train_count, seed, ratio);
}

DatasetSplit merge_and_hold_out(std::span<const AspectInstance> train, std::span<const AspectInstance> dev,
                                double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw UsageError(fmt::format(
        "holdout fraction must be in (0, 1), got {} (a validation set is required for early stopping)",
        holdout_fraction));
  }
  const auto train_ids = sentence_ids(train);
  const std::unordered_set<std::string> train_set(train_ids.begin(), train_ids.end());
  for (const auto& id : sentence_ids(dev)) {
    if (train_set.contains(id)) {
      throw DataError(fmt::format("sentence id '{}' appears in both train and dev", id));
    }
  }
  std::vector<AspectInstance> merged(train.begin(), train.end());
  merged.insert(merged.end(), dev.begin(), dev.end());
  const std::size_t sentences = sentence_ids(merged).size();
  if (sentences < 2) {
    throw DataError(fmt::format("need at least 2 distinct sentences to hold out, got {}", sentences));
  }
  const std::size_t holdout = clamp_count(holdout_fraction * static_cast<double>(sentences), sentences);
  return split_by_sentence(merged, holdout, seed, 1.0 - holdout_fraction);
}

}  // namespace dimasr::data
