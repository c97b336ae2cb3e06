#include "dimasr/data/instance_io.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"

namespace dimasr::data {

std::string render_instances(std::span<const AspectInstance> instances) {
  std::string out;
  for (const auto& instance : instances) {
    OrderedJson record;
    record["id"] = instance.sentence_id;
    record["aspect_index"] = instance.aspect_index;
    record["text"] = instance.text;
    record["aspect"] = instance.aspect;
    if (instance.gold) record["va"] = format_va_string(*instance.gold);
    out += to_json_line(record);
  }
  return out;
}

void write_instances(const std::filesystem::path& path, std::span<const AspectInstance> instances) {
  write_file(path, render_instances(instances));
}

std::vector<AspectInstance> parse_instances_text(std::string_view content, std::string_view source) {
  std::vector<AspectInstance> instances;
  std::set<std::pair<std::string, std::size_t>> seen;
  for_each_json_line(content, source, [&](const Json& object, std::size_t line) {
    auto fail = [&](std::string_view what) {
      throw DataError(fmt::format("{}:{}: {}", source, line, what));
    };
    if (!object.is_object()) fail("malformed line: expected a JSON object");
    AspectInstance instance;
    const auto id = object.find("id");
    if (id == object.end() || !id->is_string()) fail("missing string field 'id'");
    instance.sentence_id = id->get<std::string>();
    const auto index = object.find("aspect_index");
    if (index == object.end() || !index->is_number_unsigned()) fail("missing non-negative integer 'aspect_index'");
    instance.aspect_index = index->get<std::size_t>();
    if (auto text = object.find("text"); text != object.end()) {
      if (!text->is_string()) fail("field 'text' must be a string");
      instance.text = text->get<std::string>();
    }
    if (auto aspect = object.find("aspect"); aspect != object.end()) {
      if (!aspect->is_string()) fail("field 'aspect' must be a string");
      instance.aspect = aspect->get<std::string>();
    }
    if (auto va = object.find("va"); va != object.end() && !va->is_null()) {
      if (!va->is_string()) fail("field 'va' must be a \"V#A\" string");
      try {
        instance.gold = parse_va_string(va->get<std::string>());
      } catch (const DataError& e) {
        fail(fmt::format("record '{}': {}", instance.sentence_id, e.what()));
      }
    }
    if (!seen.emplace(instance.sentence_id, instance.aspect_index).second) {
      fail(fmt::format("duplicate instance '{}' aspect_index {}", instance.sentence_id, instance.aspect_index));
    }
    instances.push_back(std::move(instance));
  });
  return instances;
}

std::vector<AspectInstance> read_instances(const std::filesystem::path& path) {
  return parse_instances_text(read_file(path), path.string());
}

std::string render_predictions(std::span<const Prediction> predictions) {
  std::string out;
  for (const auto& p : predictions) {
    OrderedJson record;
    record["id"] = p.sentence_id;
    record["aspect_index"] = p.aspect_index;
    record["aspect"] = p.aspect;
    record["va"] = format_va_string(p.va);
    out += to_json_line(record);
  }
  return out;
}

void write_predictions(const std::filesystem::path& path, std::span<const Prediction> predictions) {
  write_file(path, render_predictions(predictions));
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  for (auto& instance : read_instances(path)) {
    if (!instance.gold) {
      throw DataError(fmt::format("{}: prediction for '{}' aspect_index {} has no 'va'", path.string(),
                                  instance.sentence_id, instance.aspect_index));
    }
    out.push_back(Prediction{std::move(instance.sentence_id), instance.aspect_index, std::move(instance.aspect),
                             *instance.gold});
  }
  return out;
}

std::string render_task_submission(std::span<const Prediction> predictions) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Prediction*>> grouped;
  for (const auto& p : predictions) {
    auto [it, inserted] = grouped.try_emplace(p.sentence_id);
    if (inserted) order.push_back(p.sentence_id);
    it->second.push_back(&p);
  }
  std::string out;
  for (const auto& id : order) {
    auto& items = grouped[id];
    std::stable_sort(items.begin(), items.end(),
                     [](const Prediction* a, const Prediction* b) { return a->aspect_index < b->aspect_index; });
    OrderedJson record;
    record["ID"] = id;
    OrderedJson list = OrderedJson::array();
    for (const Prediction* p : items) {
      OrderedJson entry;
      entry["Aspect"] = p->aspect;
      entry["VA"] = format_va_string(p->va);
      list.push_back(std::move(entry));
    }
    record["Aspect_VA"] = std::move(list);
    out += to_json_line(record);
  }
  return out;
}

GoldFormat parse_gold_format(std::string_view name) {
  if (name == "auto") return GoldFormat::auto_detect;
  if (name == "instances") return GoldFormat::instances;
  if (name == "task_json") return GoldFormat::task_json;
  if (name == "simple_jsonl") return GoldFormat::simple_jsonl;
  throw UsageError(fmt::format("unknown gold format '{}' (expected auto, instances, task_json or simple_jsonl)", name));
}

namespace {

GoldFormat sniff(std::string_view content) {
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return GoldFormat::instances;
  if (content[first] == '[') return GoldFormat::task_json;
  auto end = content.find('\n', first);
  if (end == std::string_view::npos) end = content.size();
  Json object;
  try {
    object = Json::parse(content.substr(first, end - first));
  } catch (const Json::parse_error&) {
    return GoldFormat::instances;  // let the real parser report the line
  }
  if (object.contains("aspect_index")) return GoldFormat::instances;
  if (object.contains("aspects")) return GoldFormat::simple_jsonl;
  return GoldFormat::task_json;
}

}  // namespace

std::vector<AspectInstance> load_labeled_instances(const std::filesystem::path& path, GoldFormat format) {
  const std::string content = read_file(path);
  if (format == GoldFormat::auto_detect) format = sniff(content);
  std::vector<AspectInstance> instances;
  switch (format) {
    case GoldFormat::instances:
    case GoldFormat::auto_detect:
      instances = parse_instances_text(content, path.string());
      break;
    case GoldFormat::task_json:
      instances = expand_instances(parse_dataset_text(content, DatasetFormat::task_json, path.string()));
      break;
    case GoldFormat::simple_jsonl:
      instances = expand_instances(parse_dataset_text(content, DatasetFormat::simple_jsonl, path.string()));
      break;
  }
  return instances;
}

}  // namespace dimasr::data
