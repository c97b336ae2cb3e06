#include "dimasr/cli/settings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::cli {

namespace {

constexpr KeySpec kKeys[] = {
    {"seed", ValueKind::integer, "42", "master seed; every random stream is derived from it"},
    {"out", ValueKind::path, "", "output directory"},

    {"data.train", ValueKind::path, "", "labeled training file"},
    {"data.dev", ValueKind::path, "", "labeled development file (merged in submission mode)"},
    {"data.test", ValueKind::path, "", "unlabeled test file, expanded to test.jsonl"},
    {"data.format", ValueKind::text, "task_json", "task_json or simple_jsonl"},
    {"data.language", ValueKind::text, "", "language tag for the statistics table"},
    {"data.domain", ValueKind::text, "", "domain tag for the statistics table"},
    {"split.mode", ValueKind::text, "submission", "dev (80/20 of train) or submission (train+dev, 10% holdout)"},
    {"split.ratio", ValueKind::real, "0.8", "train share of sentences in dev mode"},
    {"split.holdout", ValueKind::real, "0.1", "validation share of merged sentences in submission mode"},

    {"train.data", ValueKind::path, "", "prepared directory holding fit.jsonl and val.jsonl"},
    {"train.fit", ValueKind::path, "", "fit instances (overrides train.data)"},
    {"train.val", ValueKind::path, "", "validation instances (overrides train.data)"},
    {"train.datasets", ValueKind::labeled_paths, "", "name=prepared_dir entries trained by --all"},
    {"train.jobs", ValueKind::integer, "1", "datasets trained at once by --all"},
    {"train.batch_size", ValueKind::integer, "16", "instances per update"},
    {"train.learning_rate", ValueKind::real, "2e-5", "peak learning rate"},
    {"train.warmup_ratio", ValueKind::real, "0.1", "share of updates spent warming up"},
    {"train.dropout", ValueKind::real, "0.1", "dropout in encoder and heads"},
    {"train.max_epochs", ValueKind::integer, "10", "epoch limit"},
    {"train.patience", ValueKind::integer, "3", "epochs without improvement before stopping"},
    {"train.min_delta", ValueKind::real, "0", "smallest decrease that counts as improvement"},
    {"train.grad_clip_norm", ValueKind::real, "1.0", "global gradient norm limit"},
    {"train.max_len", ValueKind::integer, "256", "maximum tokens per input"},
    {"train.weight_decay", ValueKind::real, "0.01", "AdamW decoupled weight decay"},
    {"train.adam_beta1", ValueKind::real, "0.9", "AdamW beta1"},
    {"train.adam_beta2", ValueKind::real, "0.999", "AdamW beta2"},
    {"train.adam_eps", ValueKind::real, "1e-8", "AdamW epsilon"},

    {"model.encoder", ValueKind::text, "pretrained", "pretrained or stand_in"},
    {"model.pretrained_dir", ValueKind::path, "", "directory with config.json, tokenizer.json, model.safetensors"},
    {"model.double_separator", ValueKind::boolean, "false", "two separators between text and aspect, as Hugging Face pairs XLM-R inputs"},
    {"model.head_internal_dropout", ValueKind::boolean, "true", "dropout between the two head layers"},
    {"model.hidden_size", ValueKind::integer, "32", "stand-in width"},
    {"model.num_layers", ValueKind::integer, "1", "stand-in depth"},
    {"model.num_heads", ValueKind::integer, "2", "stand-in attention heads"},
    {"model.intermediate_size", ValueKind::integer, "64", "stand-in feed-forward width"},
    {"model.vocab_size", ValueKind::integer, "4096", "stand-in hashing vocabulary"},
    {"model.init_stddev", ValueKind::real, "0.3", "stand-in init scale"},

    {"predict.checkpoint", ValueKind::path, "", "checkpoint directory"},
    {"predict.input", ValueKind::path, "", "instances to score"},
    {"predict.format", ValueKind::text, "instances", "instances, task_json or simple_jsonl"},
    {"predict.submission", ValueKind::boolean, "false", "also write submission.jsonl in the task layout"},
    {"predict.expected_hidden_dim", ValueKind::integer, "", "fail unless the checkpoint has this width"},

    {"eval.gold", ValueKind::path, "", "gold file"},
    {"eval.pred", ValueKind::path, "", "prediction file"},
    {"eval.gold_format", ValueKind::text, "auto", "auto, instances, task_json or simple_jsonl"},
    {"eval.v_edges", ValueKind::real_list, "1,3,5,7,9", "valence bin edges of the heatmap"},
    {"eval.a_edges", ValueKind::real_list, "1,3,5,7,9", "arousal bin edges of the heatmap"},

    {"llm.input", ValueKind::path, "", "instances to label"},
    {"llm.format", ValueKind::text, "instances", "instances, task_json or simple_jsonl"},
    {"llm.gold", ValueKind::path, "", "optional gold file; adds report.json"},
    {"llm.live", ValueKind::boolean, "false", "call the endpoint instead of replaying"},
    {"llm.transcript", ValueKind::path, "", "transcript to replay"},
    {"llm.model", ValueKind::text, "gpt-5.2", "model name sent to the endpoint"},
    {"llm.temperature", ValueKind::real, "0.1", "sampling temperature"},
    {"llm.max_retries", ValueKind::integer, "2", "extra attempts per instance"},
    {"llm.concurrency", ValueKind::integer, "4", "requests in flight"},
    {"llm.base_url", ValueKind::text, "https://api.openai.com/v1", "OpenAI-compatible endpoint"},
    {"llm.api_key_env", ValueKind::text, "OPENAI_API_KEY", "environment variable holding the API key"},
    {"llm.timeout", ValueKind::integer, "60", "request timeout in seconds"},
    {"llm.exemplars", ValueKind::text, "fixed", "fixed (the six built-in examples), sampled, or none"},
    {"llm.exemplar_count", ValueKind::integer, "6", "number of demonstrations"},
    {"llm.exemplar_pool", ValueKind::path, "", "labeled instances to sample demonstrations from"},

    {"compare.reports", ValueKind::labeled_paths, "", "METHOD:DATASET=report.json entries"},
    {"compare.metric", ValueKind::text, "rmse_va", "rmse_va, rmse_v or rmse_a"},
};

std::string_view section_of(std::string_view key) {
  const auto dot = key.find('.');
  return dot == std::string_view::npos ? std::string_view() : key.substr(0, dot);
}

bool in_sections(std::string_view key, std::span<const std::string_view> sections) {
  const auto s = section_of(key);
  return s.empty() || std::find(sections.begin(), sections.end(), s) != sections.end();
}

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.emplace_back(CLI::detail::trim_copy(std::string(text.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& raw) {
  std::filesystem::path p(raw);
  if (base.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

long long to_integer(std::string_view key, const std::string& s) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw UsageError(fmt::format("{}: expected an integer, got '{}'", key, s));
  }
  return v;
}

double to_real(std::string_view key, const std::string& s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError(fmt::format("{}: expected a number, got '{}'", key, s));
  }
  return v;
}

bool to_boolean(std::string_view key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw UsageError(fmt::format("{}: expected true or false, got '{}'", key, s));
}

}  // namespace

std::span<const KeySpec> known_keys() { return kKeys; }

std::string short_real(double value) {
  std::string s = fmt::format("{:g}", value);
  const auto e = s.find('e');
  if (e != std::string::npos) {
    std::size_t digits = e + 2;
    while (digits + 1 < s.size() && s[digits] == '0') s.erase(digits, 1);
  }
  return s;
}

Settings::Settings() {
  for (const auto& k : kKeys) {
    Value v;
    if (!k.default_value.empty()) {
      v.items = (k.kind == ValueKind::real_list || k.kind == ValueKind::labeled_paths)
                    ? split_commas(k.default_value)
                    : std::vector<std::string>{std::string(k.default_value)};
    }
    values_.emplace(std::string(k.key), std::move(v));
  }
}

const KeySpec& Settings::spec(std::string_view key) const {
  for (const auto& k : kKeys) {
    if (k.key == key) return k;
  }
  throw UsageError(fmt::format("unknown setting '{}'", key));
}

const Settings::Value& Settings::value(std::string_view key) const {
  spec(key);
  return values_.find(key)->second;
}

void Settings::assign(const KeySpec& k, std::vector<std::string> items, Source source,
                      const std::filesystem::path& base) {
  const bool list = k.kind == ValueKind::real_list || k.kind == ValueKind::labeled_paths;
  if (!list && items.size() > 1) throw UsageError(fmt::format("{}: expected a single value", k.key));
  if (!list && items.size() == 1 && items[0].empty()) items.clear();
  for (auto& item : items) {
    switch (k.kind) {
      case ValueKind::integer: to_integer(k.key, item); break;
      case ValueKind::real: to_real(k.key, item); break;
      case ValueKind::boolean: item = to_boolean(k.key, item) ? "true" : "false"; break;
      case ValueKind::real_list: to_real(k.key, item); break;
      case ValueKind::path: item = resolve(base, item).string(); break;
      case ValueKind::labeled_paths: {
        const auto eq = item.rfind('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
          throw UsageError(fmt::format("{}: expected LABEL=PATH, got '{}'", k.key, item));
        }
        item = item.substr(0, eq + 1) + resolve(base, item.substr(eq + 1)).string();
        break;
      }
      case ValueKind::text: break;
    }
  }
  auto& v = values_.find(k.key)->second;
  v.items = std::move(items);
  v.source = source;
}

void Settings::load_file(const std::filesystem::path& file) {
  if (!std::filesystem::is_regular_file(file)) {
    throw UsageError(fmt::format("config file '{}' not found", file.string()));
  }
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(file.string());
  } catch (const CLI::Error& e) {
    throw UsageError(fmt::format("{}: {}", file.string(), e.what()));
  }
  const auto base = file.parent_path();
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    try {
      assign(spec(key), item.inputs, Source::config_file, base);
    } catch (const UsageError& e) {
      throw UsageError(fmt::format("{}: {}", file.string(), e.what()));
    }
  }
}

void Settings::load_manifest_config(const Json& config) {
  if (!config.is_object()) throw DataError("manifest has no config object");
  for (const auto& [key, v] : config.items()) {
    std::vector<std::string> items;
    auto scalar = [](const Json& j) -> std::string {
      if (j.is_string()) return j.get<std::string>();
      if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
      if (j.is_number_integer()) return std::to_string(j.get<long long>());
      if (j.is_number()) return fmt::format("{}", j.get<double>());
      return {};
    };
    if (v.is_array()) {
      for (const auto& e : v) items.push_back(scalar(e));
    } else if (!v.is_null()) {
      items.push_back(scalar(v));
    }
    assign(spec(key), std::move(items), Source::manifest, {});
  }
}

void Settings::set(std::string_view key, std::string value, Source source) {
  const auto& k = spec(key);
  std::vector<std::string> items;
  if (k.kind == ValueKind::real_list || k.kind == ValueKind::labeled_paths) {
    items = split_commas(value);
  } else {
    items.push_back(std::move(value));
  }
  assign(k, std::move(items), source, {});
}

void Settings::set_list(std::string_view key, std::vector<std::string> values, Source source) {
  assign(spec(key), std::move(values), source, {});
}

bool Settings::has(std::string_view key) const { return !value(key).items.empty(); }

std::string Settings::scalar(std::string_view key) const {
  const auto& v = value(key);
  if (v.items.empty()) throw UsageError(fmt::format("setting '{}' is required", key));
  return v.items.front();
}

std::string Settings::text(std::string_view key) const {
  const auto& v = value(key);
  return v.items.empty() ? std::string() : v.items.front();
}

std::optional<std::filesystem::path> Settings::path(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return std::filesystem::path(scalar(key));
}

std::filesystem::path Settings::required_path(std::string_view key, std::string_view flag) const {
  if (!has(key)) throw UsageError(fmt::format("missing {} (config key {})", flag, key));
  return scalar(key);
}

long long Settings::integer(std::string_view key) const { return to_integer(key, scalar(key)); }
double Settings::real(std::string_view key) const { return to_real(key, scalar(key)); }
bool Settings::boolean(std::string_view key) const { return to_boolean(key, scalar(key)); }

std::vector<double> Settings::reals(std::string_view key) const {
  std::vector<double> out;
  for (const auto& s : value(key).items) out.push_back(to_real(key, s));
  return out;
}

std::vector<std::pair<std::string, std::filesystem::path>> Settings::labeled_paths(std::string_view key) const {
  std::vector<std::pair<std::string, std::filesystem::path>> out;
  for (const auto& s : value(key).items) {
    const auto eq = s.rfind('=');
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

std::uint64_t Settings::seed() const {
  const long long s = integer("seed");
  if (s < 0) throw UsageError(fmt::format("seed must be non-negative, got {}", s));
  return static_cast<std::uint64_t>(s);
}

Source Settings::source(std::string_view key) const { return value(key).source; }

OrderedJson Settings::to_json(std::span<const std::string_view> sections) const {
  OrderedJson out = OrderedJson::object();
  for (const auto& k : kKeys) {
    if (!in_sections(k.key, sections)) continue;
    const auto& v = values_.find(k.key)->second;
    OrderedJson j;
    switch (k.kind) {
      case ValueKind::real_list:
        j = OrderedJson::array();
        for (const auto& s : v.items) j.push_back(to_real(k.key, s));
        break;
      case ValueKind::labeled_paths:
        j = OrderedJson::array();
        for (const auto& s : v.items) j.push_back(s);
        break;
      default:
        if (v.items.empty()) {
          j = nullptr;
        } else if (k.kind == ValueKind::integer) {
          j = to_integer(k.key, v.items[0]);
        } else if (k.kind == ValueKind::real) {
          j = to_real(k.key, v.items[0]);
        } else if (k.kind == ValueKind::boolean) {
          j = v.items[0] == "true";
        } else {
          j = v.items[0];
        }
    }
    out[std::string(k.key)] = std::move(j);
  }
  return out;
}

std::vector<std::string> Settings::overridden(std::span<const std::string_view> sections) const {
  std::vector<std::string> out;
  for (const auto& k : kKeys) {
    if (in_sections(k.key, sections) && values_.find(k.key)->second.source != Source::preset) {
      out.emplace_back(k.key);
    }
  }
  return out;
}

}  // namespace dimasr::cli
