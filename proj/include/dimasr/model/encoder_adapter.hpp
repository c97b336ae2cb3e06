#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dimasr/nn/transformer.hpp"
#include "dimasr/text/tokenizer.hpp"

namespace dimasr::model {

enum class EncoderKind { stand_in, pretrained };

/// Shape of the small randomly initialized encoder used for tests and smoke
/// runs.
struct StandInOptions {
  int hidden_size = 32;
  int num_layers = 1;
  int num_heads = 2;
  int intermediate_size = 64;
  int vocab_size = 4096;
  double dropout = 0.1;
  /// Std of the normal weight init. Much larger than the usual 0.02: at that
  /// scale the untrained first-token output barely depends on the input.
  double init_stddev = 0.3;
};

/// How the tokenizer is reconstructed when a checkpoint is loaded.
struct TokenizerSpec {
  enum class Kind { hash, unigram } kind = Kind::hash;
  int hash_vocab_size = 4096;
  /// tokenizer.json contents for the unigram kind.
  std::string unigram_json;
};

/// Tokenizer + Transformer encoder producing the first-token vector of a
/// (text, aspect) pair.
class EncoderAdapter {
 public:
  EncoderAdapter(std::string name, EncoderKind kind, TokenizerSpec tokenizer, nn::TransformerEncoder encoder,
                 int max_len, bool double_separator = false);

  /// Randomly initialized stand-in with a hashing tokenizer.
  static EncoderAdapter stand_in(const StandInOptions& options, int max_len, std::uint64_t seed);

  /// Loads a Hugging Face style model directory holding config.json,
  /// tokenizer.json and model.safetensors (BERT/RoBERTa/XLM-R layout).
  static EncoderAdapter load_pretrained(const std::filesystem::path& dir, int max_len,
                                        bool double_separator = false);

  /// start, text..., sep, [sep,] aspect..., sep. Only text tokens are
  /// truncated to fit max_len. Throws DataError for an empty aspect or one
  /// that cannot fit on its own.
  std::vector<int> build_input(std::string_view text, std::string_view aspect) const;

  /// First-token vector [1, d].
  nn::RowVector encode(std::span<const int> tokens, Rng* dropout_rng, nn::TransformerEncoder::Tape* tape) const;
  void backward(const nn::TransformerEncoder::Tape& tape, const nn::RowVector& d_first);

  const std::string& name() const { return name_; }
  EncoderKind kind() const { return kind_; }
  int hidden_dim() const { return encoder_.hidden_size(); }
  int max_len() const { return max_len_; }
  bool double_separator() const { return double_separator_; }
  const text::Tokenizer& tokenizer() const { return *tokenizer_; }
  const TokenizerSpec& tokenizer_spec() const { return tokenizer_spec_; }
  const nn::EncoderConfig& config() const { return encoder_.config(); }

  nn::ParameterList parameters() { return encoder_.parameters(); }

 private:
  std::string name_;
  EncoderKind kind_;
  TokenizerSpec tokenizer_spec_;
  std::unique_ptr<text::Tokenizer> tokenizer_;
  nn::TransformerEncoder encoder_;
  int max_len_;
  bool double_separator_;
};

std::unique_ptr<text::Tokenizer> make_tokenizer(const TokenizerSpec& spec);

nlohmann::json encoder_config_to_json(const nn::EncoderConfig& config);
nn::EncoderConfig encoder_config_from_json(const nlohmann::json& json);

}  // namespace dimasr::model
