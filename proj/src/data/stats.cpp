#include "dimasr/data/stats.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace dimasr::data {

StatsTable dataset_stats(std::span<const DatasetGroup> groups) {
  StatsTable table;
  for (const auto& group : groups) {
    auto it = std::find_if(table.entries.begin(), table.entries.end(), [&](const StatsEntry& e) {
      return e.language == group.language && e.domain == group.domain && e.split == group.split;
    });
    if (it == table.entries.end()) {
      table.entries.push_back(StatsEntry{group.language, group.domain, group.split, 0, 0});
      it = std::prev(table.entries.end());
    }
    for (const auto& record : group.records) {
      ++it->sentences;
      it->instances += record.aspects.size();
    }
  }
  for (const auto& entry : table.entries) {
    table.total_sentences += entry.sentences;
    table.total_instances += entry.instances;
  }
  return table;
}

std::string format_stats_table(const StatsTable& table) {
  std::vector<std::string> splits;
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& e : table.entries) {
    if (std::find(splits.begin(), splits.end(), e.split) == splits.end()) splits.push_back(e.split);
    const auto key = std::make_pair(e.language, e.domain);
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }

  std::string out = fmt::format("{:<10} {:<14}", "Language", "Domain");
  for (const auto& split : splits) out += fmt::format(" {:>18}", split);
  out += "\n";
  for (const auto& [language, domain] : rows) {
    out += fmt::format("{:<10} {:<14}", language, domain);
    for (const auto& split : splits) {
      auto it = std::find_if(table.entries.begin(), table.entries.end(), [&](const StatsEntry& e) {
        return e.language == language && e.domain == domain && e.split == split;
      });
      if (it == table.entries.end()) {
        out += fmt::format(" {:>18}", "-");
      } else {
        out += fmt::format(" {:>18}", fmt::format("{} ({})", it->sentences, it->instances));
      }
    }
    out += "\n";
  }
  out += fmt::format("total: {} sentences, {} instances\n", table.total_sentences, table.total_instances);
  return out;
}

}  // namespace dimasr::data
