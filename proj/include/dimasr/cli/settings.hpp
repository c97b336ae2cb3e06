#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimasr/common/json_lines.hpp"

namespace dimasr::cli {

enum class ValueKind {
  text,
  path,
  integer,
  real,
  boolean,
  real_list,
  /// "label=path" entries; the path part is resolved like any other path.
  labeled_paths,
};

struct KeySpec {
  std::string_view key;  // "section.name", or a bare name for run-wide keys
  ValueKind kind;
  std::string_view default_value;  // empty: unset
  std::string_view help;
};

/// Every key a config file, manifest or flag may set.
std::span<const KeySpec> known_keys();

enum class Source { preset, config_file, manifest, command_line };

/// Resolved run settings. Layers apply in call order, later ones winning:
/// built-in defaults, then a config file or a manifest, then flags.
/// Unknown keys are rejected so typos do not pass silently.
class Settings {
 public:
  Settings();

  /// TOML/INI-style file: `key = value` lines under `[section]` headers,
  /// arrays as `[a, b]`. Relative paths resolve against the file's folder.
  void load_file(const std::filesystem::path& file);
  /// The "config" object of a manifest written by an earlier run.
  void load_manifest_config(const Json& config);
  void set(std::string_view key, std::string value, Source source = Source::command_line);
  void set_list(std::string_view key, std::vector<std::string> values, Source source = Source::command_line);

  bool has(std::string_view key) const;
  std::string text(std::string_view key) const;
  std::optional<std::filesystem::path> path(std::string_view key) const;
  /// Throws UsageError naming the key and the flag that sets it.
  std::filesystem::path required_path(std::string_view key, std::string_view flag) const;
  long long integer(std::string_view key) const;
  double real(std::string_view key) const;
  bool boolean(std::string_view key) const;
  std::vector<double> reals(std::string_view key) const;
  std::vector<std::pair<std::string, std::filesystem::path>> labeled_paths(std::string_view key) const;
  std::uint64_t seed() const;

  Source source(std::string_view key) const;
  /// Resolved values of run-wide keys plus the given sections, typed.
  OrderedJson to_json(std::span<const std::string_view> sections) const;
  /// Keys within those sections whose value did not come from the defaults.
  std::vector<std::string> overridden(std::span<const std::string_view> sections) const;

 private:
  struct Value {
    std::vector<std::string> items;
    Source source = Source::preset;
  };
  const KeySpec& spec(std::string_view key) const;
  const Value& value(std::string_view key) const;
  std::string scalar(std::string_view key) const;
  void assign(const KeySpec& spec, std::vector<std::string> items, Source source,
              const std::filesystem::path& base);

  std::map<std::string, Value, std::less<>> values_;
};

/// "2e-5" rather than "2e-05"; integers without a trailing ".0".
std::string short_real(double value);

}  // namespace dimasr::cli
