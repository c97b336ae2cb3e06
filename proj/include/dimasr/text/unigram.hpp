#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dimasr/text/charsmap.hpp"
#include "dimasr/text/tokenizer.hpp"

namespace dimasr::text {

/// SentencePiece-style Unigram tokenizer driven by a Hugging Face
/// `tokenizer.json`. Supports the pipeline used by XLM-RoBERTa:
///   normalizers: Sequence, Precompiled, Strip, Replace (string or regex)
///   pre-tokenizers: Sequence, Metaspace, WhitespaceSplit
///   model: Unigram (Viterbi, unknown pieces fused)
/// Special added tokens are excluded from segmentation.
class UnigramTokenizer final : public Tokenizer {
 public:
  static std::unique_ptr<UnigramTokenizer> from_file(const std::filesystem::path& path);
  static std::unique_ptr<UnigramTokenizer> from_json(std::string_view json, std::string_view source = "<memory>");

  std::vector<int> encode(std::string_view text) const override;
  const SpecialTokens& special() const override { return special_; }
  int vocab_size() const override { return static_cast<int>(pieces_.size()); }

  /// Output of the normalizer chain.
  std::string normalize(std::string_view text) const;
  /// Output of normalizer + pre-tokenizer.
  std::vector<std::string> pre_tokenize(std::string_view text) const;
  /// Viterbi segmentation of one pre-tokenized word.
  std::vector<int> segment(std::string_view word) const;

  const std::string& piece(int id) const { return pieces_.at(static_cast<std::size_t>(id)).first; }

  struct Strip {
    bool left = false;
    bool right = false;
  };
  struct Replace {
    std::string pattern;
    bool is_regex = false;
    std::string content;
  };
  using Normalizer = std::variant<PrecompiledCharsmap, Strip, Replace>;

  struct Metaspace {
    std::string replacement = "\xE2\x96\x81";
    enum class Prepend { always, first, never } prepend = Prepend::always;
    bool split = true;
  };
  struct WhitespaceSplit {};
  using PreTokenizer = std::variant<Metaspace, WhitespaceSplit>;

 private:
  UnigramTokenizer() = default;

  std::vector<std::pair<std::string, double>> pieces_;
  std::unordered_map<std::string, int> piece_ids_;
  std::size_t max_piece_bytes_ = 0;
  double unk_score_ = 0.0;
  SpecialTokens special_;
  std::vector<Normalizer> normalizers_;
  std::vector<PreTokenizer> pre_tokenizers_;
};

}  // namespace dimasr::text
