#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dimasr/common/json_lines.hpp"

namespace dimasr::cli {

inline constexpr std::string_view kManifestName = "manifest.json";

struct Artifact {
  std::string role;
  std::string path;  // outputs: relative to the output directory
  std::string sha256;
};

/// How an output directory was produced. Re-running the command with
/// `--from-manifest` on this file restores the same settings.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string timestamp;
  OrderedJson config = OrderedJson::object();
  std::vector<std::string> overrides;
  std::vector<Artifact> inputs;
  std::vector<Artifact> outputs;
};

std::string sha256_hex(std::string_view bytes);
/// Throws DataError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// UTC ISO-8601. Uses SOURCE_DATE_EPOCH when set so reproducible builds of
/// an output tree can pin it.
std::string run_timestamp();

/// Fills sha256 for each input (absolute or cwd-relative paths).
Artifact input_artifact(std::string role, const std::filesystem::path& path);
/// Hashes `dir / relative`.
Artifact output_artifact(std::string role, const std::filesystem::path& dir, const std::filesystem::path& relative);

OrderedJson manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& doc);
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace dimasr::cli
