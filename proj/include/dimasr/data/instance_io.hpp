#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dimasr/data/dataset.hpp"

namespace dimasr::data {

/// A prediction for one instance, keyed like the instance it answers.
struct Prediction {
  std::string sentence_id;
  std::size_t aspect_index = 0;
  std::string aspect;
  VAPair va = VAPair::midpoint();

  bool operator==(const Prediction&) const = default;
};

/// Instance files hold one object per line:
///   {"id", "aspect_index", "text", "aspect", "va"?}
/// Prediction files use the same keys minus "text", with a mandatory "va"
/// rendered to two decimals. Both read back through read_instances.
std::string render_instances(std::span<const AspectInstance> instances);
void write_instances(const std::filesystem::path& path, std::span<const AspectInstance> instances);

/// Reads an instance or prediction file. Duplicate (id, aspect_index) keys
/// raise DataError.
std::vector<AspectInstance> parse_instances_text(std::string_view content, std::string_view source);
std::vector<AspectInstance> read_instances(const std::filesystem::path& path);

std::string render_predictions(std::span<const Prediction> predictions);
void write_predictions(const std::filesystem::path& path, std::span<const Prediction> predictions);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

/// Groups predictions back into the shared-task submission layout:
///   {"ID", "Aspect_VA": [{"Aspect", "VA"}]} per sentence, first-seen order.
std::string render_task_submission(std::span<const Prediction> predictions);

/// Gold labels for scoring may come from an instance/prediction file or from
/// a raw dataset file.
enum class GoldFormat { auto_detect, instances, task_json, simple_jsonl };

GoldFormat parse_gold_format(std::string_view name);

/// Loads labeled instances. `auto_detect` looks at the first record: an
/// "aspect_index" key means instance layout, an "aspects" key means
/// simple_jsonl, anything else task_json.
std::vector<AspectInstance> load_labeled_instances(const std::filesystem::path& path, GoldFormat format);

}  // namespace dimasr::data
