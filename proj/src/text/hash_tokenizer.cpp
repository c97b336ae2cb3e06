#include "dimasr/text/hash_tokenizer.hpp"

#include <cctype>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/common/rng.hpp"
#include "dimasr/text/utf8.hpp"

namespace dimasr::text {

namespace {
constexpr int kReserved = 4;
}

HashTokenizer::HashTokenizer(int vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size <= kReserved) {
    throw UsageError(fmt::format("hash tokenizer vocabulary must exceed {} ids, got {}", kReserved, vocab_size));
  }
}

std::vector<std::string> HashTokenizer::split(std::string_view text) const {
  std::vector<std::string> pieces;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) pieces.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const Decoded d = decode_utf8(text, pos);
    const std::string_view raw = text.substr(pos, d.length);
    pos += d.length;
    if (is_unicode_space(d.code_point)) {
      flush();
    } else if (d.code_point < 0x80 && std::ispunct(static_cast<int>(d.code_point))) {
      flush();
      pieces.emplace_back(raw);
    } else if (is_cjk(d.code_point)) {
      flush();
      pieces.emplace_back(raw);
    } else if (d.code_point < 0x80) {
      word.push_back(static_cast<char>(std::tolower(static_cast<int>(d.code_point))));
    } else {
      word.append(raw);
    }
  }
  flush();
  return pieces;
}

std::vector<int> HashTokenizer::encode(std::string_view text) const {
  std::vector<int> ids;
  const auto buckets = static_cast<std::uint64_t>(vocab_size_ - kReserved);
  for (const auto& piece : split(text)) {
    ids.push_back(kReserved + static_cast<int>(fnv1a64(piece) % buckets));
  }
  return ids;
}

}  // namespace dimasr::text
