#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dimasr/data/dataset.hpp"

namespace dimasr::data {

/// A labeled slice of records, e.g. ("eng", "restaurant", "train").
struct DatasetGroup {
  std::string language;
  std::string domain;
  std::string split;
  std::span<const SentenceRecord> records;
};

struct StatsEntry {
  std::string language;
  std::string domain;
  std::string split;
  std::size_t sentences = 0;
  std::size_t instances = 0;
};

struct StatsTable {
  /// One entry per distinct (language, domain, split), first-seen order.
  std::vector<StatsEntry> entries;
  std::size_t total_sentences = 0;
  std::size_t total_instances = 0;
};

StatsTable dataset_stats(std::span<const DatasetGroup> groups);

/// Sentence counts with splits as columns (instances in parentheses),
/// followed by a totals line.
std::string format_stats_table(const StatsTable& table);

}  // namespace dimasr::data
