#include "dimasr/model/checkpoint.hpp"

#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"
#include "dimasr/nn/safetensors.hpp"

namespace dimasr::model {

namespace {
constexpr const char* kManifest = "checkpoint.json";
constexpr const char* kWeights = "weights.safetensors";
constexpr const char* kTokenizer = "tokenizer.json";
}  // namespace

void save_checkpoint(const DimASRModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const EncoderAdapter& encoder = model.encoder();

  nlohmann::ordered_json manifest;
  manifest["format"] = "dimasr-checkpoint";
  manifest["version"] = kCheckpointVersion;
  manifest["hidden_dim"] = model.hidden_dim();
  manifest["max_len"] = encoder.max_len();
  manifest["input_dropout"] = model.options().input_dropout;
  manifest["head_dropout"] = model.options().head_dropout;
  manifest["head_internal_dropout"] = model.options().head_internal_dropout;
  manifest["seed"] = model.seed();
  nlohmann::ordered_json enc;
  enc["name"] = encoder.name();
  enc["kind"] = encoder.kind() == EncoderKind::stand_in ? "stand_in" : "pretrained";
  enc["double_separator"] = encoder.double_separator();
  enc["config"] = encoder_config_to_json(encoder.config());
  const TokenizerSpec& tok = encoder.tokenizer_spec();
  if (tok.kind == TokenizerSpec::Kind::hash) {
    enc["tokenizer"] = {{"kind", "hash"}, {"vocab_size", tok.hash_vocab_size}};
  } else {
    enc["tokenizer"] = {{"kind", "unigram"}, {"file", kTokenizer}};
    write_file(dir / kTokenizer, tok.unigram_json);
  }
  manifest["encoder"] = std::move(enc);
  manifest["weights"] = kWeights;

  std::map<std::string, const nn::Matrix*> tensors;
  for (const nn::Parameter* p : model.parameters()) tensors.emplace(p->name, &p->value);
  nn::write_safetensors(dir / kWeights, tensors, {{"format", "dimasr"}});
  write_file(dir / kManifest, manifest.dump(2) + "\n");
}

DimASRModel load_checkpoint(const std::filesystem::path& dir, std::optional<int> expected_hidden_dim) {
  const auto manifest_path = dir / kManifest;
  if (!std::filesystem::exists(manifest_path)) {
    throw DataError(fmt::format("no checkpoint at '{}' (missing {})", dir.string(), kManifest));
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
  try {
    if (manifest.value("format", std::string()) != "dimasr-checkpoint") {
      throw DataError(fmt::format("{}: not a checkpoint manifest", manifest_path.string()));
    }
    const int version = manifest.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw DataError(fmt::format("{}: checkpoint version {} is not supported (expected {})", manifest_path.string(),
                                  version, kCheckpointVersion));
    }
    const int hidden_dim = manifest.at("hidden_dim").get<int>();
    if (expected_hidden_dim && *expected_hidden_dim != hidden_dim) {
      throw DataError(fmt::format("checkpoint hidden_dim {} does not match configured hidden_dim {}", hidden_dim,
                                  *expected_hidden_dim));
    }

    const auto& enc = manifest.at("encoder");
    const nn::EncoderConfig config = encoder_config_from_json(enc.at("config"));
    if (config.hidden_size != hidden_dim) {
      throw DataError(fmt::format("{}: encoder hidden_size {} disagrees with hidden_dim {}", manifest_path.string(),
                                  config.hidden_size, hidden_dim));
    }
    TokenizerSpec tok;
    const auto& tok_json = enc.at("tokenizer");
    if (tok_json.at("kind").get<std::string>() == "hash") {
      tok.kind = TokenizerSpec::Kind::hash;
      tok.hash_vocab_size = tok_json.at("vocab_size").get<int>();
    } else {
      tok.kind = TokenizerSpec::Kind::unigram;
      tok.unigram_json = read_file(dir / tok_json.at("file").get<std::string>());
    }
    const EncoderKind kind = enc.at("kind").get<std::string>() == "stand_in" ? EncoderKind::stand_in
                                                                             : EncoderKind::pretrained;
    EncoderAdapter adapter(enc.at("name").get<std::string>(), kind, std::move(tok), nn::TransformerEncoder(config),
                           manifest.at("max_len").get<int>(), enc.value("double_separator", false));

    ModelOptions options;
    options.input_dropout = manifest.at("input_dropout").get<double>();
    options.head_dropout = manifest.at("head_dropout").get<double>();
    options.head_internal_dropout = manifest.at("head_internal_dropout").get<bool>();
    DimASRModel model(std::move(adapter), options, manifest.at("seed").get<std::uint64_t>());

    nn::SafetensorsReader reader(dir / manifest.value("weights", std::string(kWeights)));
    for (nn::Parameter* p : model.parameters()) {
      nn::Matrix value = reader.read(p->name);
      if (value.rows() != p->value.rows() || value.cols() != p->value.cols()) {
        throw DataError(fmt::format("checkpoint tensor '{}' has shape {}x{}, expected {}x{}", p->name, value.rows(),
                                    value.cols(), p->value.rows(), p->value.cols()));
      }
      p->value = std::move(value);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
}

}  // namespace dimasr::model
