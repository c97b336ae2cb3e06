#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimasr/data/va_pair.hpp"

namespace dimasr::data {

struct AspectLabel {
  std::string aspect;
  std::optional<VAPair> gold;

  bool operator==(const AspectLabel&) const = default;
};

/// One sentence with its ordered aspects. Aspect strings are kept verbatim,
/// including the literal "NULL" used for implicit targets.
struct SentenceRecord {
  std::string id;
  std::string text;
  std::vector<AspectLabel> aspects;

  bool operator==(const SentenceRecord&) const = default;
};

/// A single (text, aspect) sample. (sentence_id, aspect_index) identifies it.
struct AspectInstance {
  std::string sentence_id;
  std::size_t aspect_index = 0;
  std::string text;
  std::string aspect;
  std::optional<VAPair> gold;

  bool operator==(const AspectInstance&) const = default;
};

enum class DatasetFormat {
  /// Shared-task layout: objects with ID / Text / Aspect_VA (or Quadruplet)
  /// entries carrying "V#A" strings. Either a JSON array or JSON lines.
  task_json,
  /// One {"id", "text", "aspects": [{"aspect", "va"}]} object per line.
  simple_jsonl,
};

/// Field names of the shared-task layout. The official files name the
/// aspect list either "Aspect_VA" or "Quadruplet"; unlabeled files carry a
/// plain string list under "Aspect".
struct TaskJsonSchema {
  std::string id_key = "ID";
  std::string text_key = "Text";
  std::vector<std::string> labeled_list_keys = {"Aspect_VA", "Quadruplet"};
  std::string aspect_key = "Aspect";
  std::string va_key = "VA";
  std::string unlabeled_list_key = "Aspect";
};

DatasetFormat parse_format_name(std::string_view name);
std::string_view format_name(DatasetFormat format);

/// Parses an in-memory dataset. `source` is used in error messages. Records
/// keep file order. Throws DataError on a malformed line (naming the line),
/// an empty aspect list, an out-of-range VA (naming the record id), or a
/// duplicate id.
std::vector<SentenceRecord> parse_dataset_text(std::string_view content, DatasetFormat format,
                                               std::string_view source = "<memory>",
                                               const TaskJsonSchema& schema = {});

std::vector<SentenceRecord> parse_dataset(const std::filesystem::path& path, DatasetFormat format,
                                          const TaskJsonSchema& schema = {});

/// One instance per (sentence, aspect), in record order.
std::vector<AspectInstance> expand_instances(std::span<const SentenceRecord> records);

}  // namespace dimasr::data
