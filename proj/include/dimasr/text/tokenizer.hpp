#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dimasr::text {

struct SpecialTokens {
  int cls = 0;
  int pad = 1;
  int sep = 2;
  int unk = 3;
};

/// Maps text to vocabulary ids, without adding special tokens.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<int> encode(std::string_view text) const = 0;
  virtual const SpecialTokens& special() const = 0;
  virtual int vocab_size() const = 0;
};

}  // namespace dimasr::text
