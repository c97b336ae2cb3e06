#include "dimasr/model/encoder_adapter.hpp"

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"
#include "dimasr/nn/safetensors.hpp"
#include "dimasr/text/hash_tokenizer.hpp"
#include "dimasr/text/unigram.hpp"

namespace dimasr::model {

std::unique_ptr<text::Tokenizer> make_tokenizer(const TokenizerSpec& spec) {
  if (spec.kind == TokenizerSpec::Kind::hash) {
    return std::make_unique<text::HashTokenizer>(spec.hash_vocab_size);
  }
  return text::UnigramTokenizer::from_json(spec.unigram_json, "tokenizer.json");
}

EncoderAdapter::EncoderAdapter(std::string name, EncoderKind kind, TokenizerSpec tokenizer,
                               nn::TransformerEncoder encoder, int max_len, bool double_separator)
    : name_(std::move(name)),
      kind_(kind),
      tokenizer_spec_(std::move(tokenizer)),
      tokenizer_(make_tokenizer(tokenizer_spec_)),
      encoder_(std::move(encoder)),
      max_len_(max_len),
      double_separator_(double_separator) {
  const int specials = double_separator_ ? 4 : 3;
  if (max_len_ <= specials) {
    throw UsageError(fmt::format("max_len {} leaves no room for tokens", max_len_));
  }
  if (max_len_ > encoder_.config().max_sequence_length()) {
    throw UsageError(fmt::format("max_len {} exceeds the encoder's position table ({})", max_len_,
                                 encoder_.config().max_sequence_length()));
  }
  if (tokenizer_->vocab_size() > encoder_.config().vocab_size) {
    throw UsageError(fmt::format("tokenizer vocabulary ({}) is larger than the embedding table ({})",
                                 tokenizer_->vocab_size(), encoder_.config().vocab_size));
  }
}

EncoderAdapter EncoderAdapter::stand_in(const StandInOptions& options, int max_len, std::uint64_t seed) {
  nn::EncoderConfig config;
  config.vocab_size = options.vocab_size;
  config.hidden_size = options.hidden_size;
  config.num_layers = options.num_layers;
  config.num_heads = options.num_heads;
  config.intermediate_size = options.intermediate_size;
  config.max_positions = max_len + 2;
  config.position_offset = 2;
  config.hidden_dropout = options.dropout;
  config.attention_dropout = options.dropout;
  nn::TransformerEncoder encoder(config);
  Rng rng(derive_seed(seed, "init/encoder"));
  encoder.init_random(rng, options.init_stddev);
  TokenizerSpec spec;
  spec.kind = TokenizerSpec::Kind::hash;
  spec.hash_vocab_size = options.vocab_size;
  return EncoderAdapter("stand-in", EncoderKind::stand_in, std::move(spec), std::move(encoder), max_len);
}

nlohmann::json encoder_config_to_json(const nn::EncoderConfig& c) {
  return {{"vocab_size", c.vocab_size},
          {"hidden_size", c.hidden_size},
          {"num_hidden_layers", c.num_layers},
          {"num_attention_heads", c.num_heads},
          {"intermediate_size", c.intermediate_size},
          {"max_position_embeddings", c.max_positions},
          {"type_vocab_size", c.type_vocab_size},
          {"position_offset", c.position_offset},
          {"layer_norm_eps", c.layer_norm_eps},
          {"hidden_dropout_prob", c.hidden_dropout},
          {"attention_probs_dropout_prob", c.attention_dropout}};
}

nn::EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
  nn::EncoderConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.hidden_size = j.at("hidden_size").get<int>();
  c.num_layers = j.at("num_hidden_layers").get<int>();
  c.num_heads = j.at("num_attention_heads").get<int>();
  c.intermediate_size = j.at("intermediate_size").get<int>();
  c.max_positions = j.at("max_position_embeddings").get<int>();
  c.type_vocab_size = j.value("type_vocab_size", 1);
  c.layer_norm_eps = j.value("layer_norm_eps", 1e-12);
  c.hidden_dropout = j.value("hidden_dropout_prob", 0.1);
  c.attention_dropout = j.value("attention_probs_dropout_prob", 0.1);
  if (j.contains("position_offset")) {
    c.position_offset = j.at("position_offset").get<int>();
  } else {
    // RoBERTa-family position ids start after the padding index; BERT at 0.
    const std::string type = j.value("model_type", std::string("bert"));
    const bool roberta_family = type == "roberta" || type == "xlm-roberta" || type == "camembert";
    c.position_offset = roberta_family ? j.value("pad_token_id", 1) + 1 : 0;
  }
  return c;
}

namespace {

/// Maps our parameter name to the checkpoint key, trying the usual wrapper
/// prefixes and the legacy gamma/beta LayerNorm names.
std::string resolve_key(const nn::SafetensorsReader& reader, const std::string& name) {
  static const char* kPrefixes[] = {"", "roberta.", "bert.", "model.", "xlm_roberta."};
  for (const char* prefix : kPrefixes) {
    const std::string key = prefix + name;
    if (reader.contains(key)) return key;
    if (name.ends_with("LayerNorm.weight")) {
      const std::string legacy = prefix + name.substr(0, name.size() - 6) + "gamma";
      if (reader.contains(legacy)) return legacy;
    } else if (name.ends_with("LayerNorm.bias")) {
      const std::string legacy = prefix + name.substr(0, name.size() - 4) + "beta";
      if (reader.contains(legacy)) return legacy;
    }
  }
  throw DataError(fmt::format("pretrained weights lack tensor '{}'", name));
}

}  // namespace

EncoderAdapter EncoderAdapter::load_pretrained(const std::filesystem::path& dir, int max_len,
                                               bool double_separator) {
  const auto config_path = dir / "config.json";
  const auto tokenizer_path = dir / "tokenizer.json";
  const auto weights_path = dir / "model.safetensors";
  nlohmann::json config_json;
  try {
    config_json = nlohmann::json::parse(read_file(config_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: {}", config_path.string(), e.what()));
  }
  const std::string act = config_json.value("hidden_act", std::string("gelu"));
  if (act != "gelu") {
    throw DataError(fmt::format("{}: unsupported activation '{}' (only exact gelu)", config_path.string(), act));
  }
  nn::EncoderConfig config = encoder_config_from_json(config_json);
  nn::TransformerEncoder encoder(config);

  nn::SafetensorsReader reader(weights_path);
  for (nn::Parameter* p : encoder.parameters()) {
    nn::Matrix value = reader.read(resolve_key(reader, p->name));
    if (value.rows() != p->value.rows() || value.cols() != p->value.cols()) {
      throw DataError(fmt::format("{}: tensor '{}' has shape {}x{}, expected {}x{}", weights_path.string(), p->name,
                                  value.rows(), value.cols(), p->value.rows(), p->value.cols()));
    }
    p->value = std::move(value);
  }

  TokenizerSpec spec;
  spec.kind = TokenizerSpec::Kind::unigram;
  spec.unigram_json = read_file(tokenizer_path);
  const std::string name = config_json.value("_name_or_path", dir.filename().string());
  return EncoderAdapter(name.empty() ? dir.filename().string() : name, EncoderKind::pretrained, std::move(spec),
                        std::move(encoder), max_len, double_separator);
}

std::vector<int> EncoderAdapter::build_input(std::string_view text, std::string_view aspect) const {
  if (aspect.empty()) throw DataError("aspect is empty");
  std::vector<int> text_ids = tokenizer_->encode(text);
  const std::vector<int> aspect_ids = tokenizer_->encode(aspect);
  const std::size_t specials = double_separator_ ? 4 : 3;
  const auto limit = static_cast<std::size_t>(max_len_);
  if (aspect_ids.size() + specials > limit) {
    throw DataError(fmt::format("aspect '{}' needs {} tokens, more than max_len {} allows", aspect,
                                aspect_ids.size(), max_len_));
  }
  const std::size_t text_budget = limit - specials - aspect_ids.size();
  if (text_ids.size() > text_budget) text_ids.resize(text_budget);

  const auto& sp = tokenizer_->special();
  std::vector<int> seq;
  seq.reserve(text_ids.size() + aspect_ids.size() + specials);
  seq.push_back(sp.cls);
  seq.insert(seq.end(), text_ids.begin(), text_ids.end());
  seq.push_back(sp.sep);
  if (double_separator_) seq.push_back(sp.sep);
  seq.insert(seq.end(), aspect_ids.begin(), aspect_ids.end());
  seq.push_back(sp.sep);
  return seq;
}

nn::RowVector EncoderAdapter::encode(std::span<const int> tokens, Rng* dropout_rng,
                                     nn::TransformerEncoder::Tape* tape) const {
  const nn::Matrix hidden = encoder_.forward(tokens, dropout_rng, tape);
  return hidden.row(0);
}

void EncoderAdapter::backward(const nn::TransformerEncoder::Tape& tape, const nn::RowVector& d_first) {
  nn::Matrix d_hidden = nn::Matrix::Zero(tape.length(), encoder_.hidden_size());
  d_hidden.row(0) = d_first;
  encoder_.backward(tape, d_hidden);
}

}  // namespace dimasr::model
