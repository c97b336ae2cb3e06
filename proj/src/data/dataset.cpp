#include "dimasr/data/dataset.hpp"

#include <unordered_set>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"

namespace dimasr::data {

DatasetFormat parse_format_name(std::string_view name) {
  if (name == "task_json") return DatasetFormat::task_json;
  if (name == "simple_jsonl") return DatasetFormat::simple_jsonl;
  throw UsageError(fmt::format("unknown dataset format '{}' (expected task_json or simple_jsonl)", name));
}

std::string_view format_name(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::task_json:
      return "task_json";
    case DatasetFormat::simple_jsonl:
      return "simple_jsonl";
  }
  return "?";
}

namespace {

struct Location {
  std::string_view source;
  std::size_t line;  // 0 when the record comes from a JSON array
  std::size_t index;

  std::string str() const {
    return line > 0 ? fmt::format("{}:{}", source, line) : fmt::format("{}[{}]", source, index);
  }
};

std::string require_string(const Json& object, const std::string& key, const Location& where) {
  const auto it = object.find(key);
  if (it == object.end() || !it->is_string()) {
    throw DataError(fmt::format("{}: missing string field '{}'", where.str(), key));
  }
  return it->get<std::string>();
}

std::optional<VAPair> parse_gold(const Json& entry, const std::string& key, const std::string& id,
                                 const Location& where) {
  const auto it = entry.find(key);
  if (it == entry.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw DataError(fmt::format("{}: record '{}': field '{}' must be a \"V#A\" string", where.str(), id, key));
  }
  try {
    return parse_va_string(it->get<std::string>());
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: record '{}': {}", where.str(), id, e.what()));
  }
}

SentenceRecord parse_task_record(const Json& object, const TaskJsonSchema& schema, const Location& where) {
  if (!object.is_object()) {
    throw DataError(fmt::format("{}: malformed line: expected a JSON object", where.str()));
  }
  SentenceRecord record;
  record.id = require_string(object, schema.id_key, where);
  record.text = require_string(object, schema.text_key, where);

  const Json* labeled = nullptr;
  for (const auto& key : schema.labeled_list_keys) {
    if (auto it = object.find(key); it != object.end() && !it->is_null()) {
      labeled = &*it;
      break;
    }
  }
  if (labeled != nullptr) {
    if (!labeled->is_array()) {
      throw DataError(fmt::format("{}: record '{}': aspect list must be an array", where.str(), record.id));
    }
    for (const auto& entry : *labeled) {
      if (!entry.is_object()) {
        throw DataError(fmt::format("{}: record '{}': aspect entry must be an object", where.str(), record.id));
      }
      AspectLabel label;
      label.aspect = require_string(entry, schema.aspect_key, where);
      label.gold = parse_gold(entry, schema.va_key, record.id, where);
      record.aspects.push_back(std::move(label));
    }
  } else if (auto it = object.find(schema.unlabeled_list_key); it != object.end() && it->is_array()) {
    for (const auto& entry : *it) {
      if (!entry.is_string()) {
        throw DataError(fmt::format("{}: record '{}': aspect names must be strings", where.str(), record.id));
      }
      record.aspects.push_back({entry.get<std::string>(), std::nullopt});
    }
  } else {
    throw DataError(fmt::format("{}: record '{}': no aspect list", where.str(), record.id));
  }
  return record;
}

SentenceRecord parse_simple_record(const Json& object, const Location& where) {
  if (!object.is_object()) {
    throw DataError(fmt::format("{}: malformed line: expected a JSON object", where.str()));
  }
  SentenceRecord record;
  record.id = require_string(object, "id", where);
  record.text = require_string(object, "text", where);
  const auto it = object.find("aspects");
  if (it == object.end() || !it->is_array()) {
    throw DataError(fmt::format("{}: record '{}': missing 'aspects' array", where.str(), record.id));
  }
  for (const auto& entry : *it) {
    if (!entry.is_object()) {
      throw DataError(fmt::format("{}: record '{}': aspect entry must be an object", where.str(), record.id));
    }
    AspectLabel label;
    label.aspect = require_string(entry, "aspect", where);
    label.gold = parse_gold(entry, "va", record.id, where);
    record.aspects.push_back(std::move(label));
  }
  return record;
}

class RecordCollector {
 public:
  void add(SentenceRecord record, const Location& where) {
    if (record.id.empty()) {
      throw DataError(fmt::format("{}: empty record id", where.str()));
    }
    if (record.aspects.empty()) {
      throw DataError(fmt::format("{}: record '{}': empty aspect list", where.str(), record.id));
    }
    if (!seen_.insert(record.id).second) {
      throw DataError(fmt::format("{}: duplicate record id '{}'", where.str(), record.id));
    }
    records_.push_back(std::move(record));
  }

  std::vector<SentenceRecord> take() { return std::move(records_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<SentenceRecord> records_;
};

bool starts_with_array(std::string_view content) {
  const auto first = content.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  return first != std::string_view::npos && content[first] == '[';
}

}  // namespace

std::vector<SentenceRecord> parse_dataset_text(std::string_view content, DatasetFormat format,
                                               std::string_view source, const TaskJsonSchema& schema) {
  RecordCollector collector;
  auto parse_one = [&](const Json& object, const Location& where) {
    collector.add(format == DatasetFormat::task_json ? parse_task_record(object, schema, where)
                                                     : parse_simple_record(object, where),
                  where);
  };

  if (format == DatasetFormat::task_json && starts_with_array(content)) {
    Json document;
    try {
      document = Json::parse(content);
    } catch (const Json::parse_error& e) {
      throw DataError(fmt::format("{}: malformed JSON: {}", source, e.what()));
    }
    std::size_t index = 0;
    for (const auto& object : document) {
      parse_one(object, Location{source, 0, index++});
    }
  } else {
    std::size_t index = 0;
    for_each_json_line(content, source, [&](const Json& object, std::size_t line) {
      parse_one(object, Location{source, line, index++});
    });
  }
  return collector.take();
}

std::vector<SentenceRecord> parse_dataset(const std::filesystem::path& path, DatasetFormat format,
                                          const TaskJsonSchema& schema) {
  const std::string content = read_file(path);
  return parse_dataset_text(content, format, path.string(), schema);
}

std::vector<AspectInstance> expand_instances(std::span<const SentenceRecord> records) {
  std::vector<AspectInstance> instances;
  std::size_t total = 0;
  for (const auto& r : records) total += r.aspects.size();
  instances.reserve(total);
  for (const auto& record : records) {
    for (std::size_t i = 0; i < record.aspects.size(); ++i) {
      instances.push_back(AspectInstance{record.id, i, record.text, record.aspects[i].aspect,
                                         record.aspects[i].gold});
    }
  }
  return instances;
}

}  // namespace dimasr::data
