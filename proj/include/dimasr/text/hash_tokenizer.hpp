#pragma once

#include "dimasr/text/tokenizer.hpp"

namespace dimasr::text {

/// Vocabulary-free tokenizer for the stand-in encoder. Splits on whitespace,
/// emits each ASCII punctuation mark and each CJK character as its own
/// token, lowercases ASCII, and hashes every token into the id range
/// [4, vocab_size). Ids 0-3 are <s>, <pad>, </s>, <unk>.
class HashTokenizer final : public Tokenizer {
 public:
  explicit HashTokenizer(int vocab_size = 4096);

  std::vector<int> encode(std::string_view text) const override;
  const SpecialTokens& special() const override { return special_; }
  int vocab_size() const override { return vocab_size_; }

  /// The surface tokens before hashing.
  std::vector<std::string> split(std::string_view text) const;

 private:
  int vocab_size_;
  SpecialTokens special_;
};

}  // namespace dimasr::text
