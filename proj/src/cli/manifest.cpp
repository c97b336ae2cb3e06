#include "dimasr/cli/manifest.hpp"

#include <chrono>
#include <cstdlib>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "dimasr/common/error.hpp"

namespace dimasr::cli {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw RuntimeFailure("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string run_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (*end != '\0' || v < 0) throw UsageError(fmt::format("SOURCE_DATE_EPOCH must be a non-negative integer, got '{}'", epoch));
    t = static_cast<std::time_t>(v);
  }
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(t));
}

Artifact input_artifact(std::string role, const std::filesystem::path& path) {
  return {std::move(role), path.string(), sha256_file(path)};
}

Artifact output_artifact(std::string role, const std::filesystem::path& dir, const std::filesystem::path& relative) {
  return {std::move(role), relative.generic_string(), sha256_file(dir / relative)};
}

namespace {

OrderedJson artifacts_to_json(const std::vector<Artifact>& list) {
  OrderedJson out = OrderedJson::array();
  for (const auto& a : list) out.push_back({{"role", a.role}, {"path", a.path}, {"sha256", a.sha256}});
  return out;
}

std::vector<Artifact> artifacts_from_json(const Json& list) {
  std::vector<Artifact> out;
  for (const auto& a : list) {
    out.push_back({a.at("role").get<std::string>(), a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

OrderedJson manifest_to_json(const RunManifest& m) {
  OrderedJson j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["timestamp"] = m.timestamp;
  j["config"] = m.config;
  j["overrides"] = m.overrides;
  j["inputs"] = artifacts_to_json(m.inputs);
  j["outputs"] = artifacts_to_json(m.outputs);
  return j;
}

RunManifest manifest_from_json(const Json& doc) {
  try {
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.timestamp = doc.value("timestamp", std::string());
    m.config = OrderedJson::parse(doc.at("config").dump());
    m.overrides = doc.value("overrides", std::vector<std::string>{});
    m.inputs = artifacts_from_json(doc.value("inputs", Json::array()));
    m.outputs = artifacts_from_json(doc.value("outputs", Json::array()));
    return m;
  } catch (const Json::exception& e) {
    throw DataError(fmt::format("malformed manifest: {}", e.what()));
  }
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  write_file(dir / kManifestName, manifest_to_json(manifest).dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw DataError(fmt::format("{}: not JSON: {}", path.string(), e.what()));
  }
  return manifest_from_json(doc);
}

}  // namespace dimasr::cli
