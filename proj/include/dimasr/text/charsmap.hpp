#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dimasr::text {

/// SentencePiece precompiled character map: a Darts double-array trie over
/// UTF-8 byte sequences whose leaf values index a blob of NUL-terminated
/// replacement strings. Normalization walks the input, replacing the longest
/// matching prefix at each position and copying unmatched characters
/// (malformed bytes become U+FFFD).
class PrecompiledCharsmap {
 public:
  PrecompiledCharsmap() = default;
  /// `blob` is the raw (already base64-decoded) map.
  explicit PrecompiledCharsmap(std::string blob);
  static PrecompiledCharsmap from_base64(std::string_view encoded);

  bool empty() const { return units_.empty(); }
  std::string normalize(std::string_view input) const;

  struct Match {
    std::uint32_t value;
    std::size_t length;
  };
  /// All keys that are prefixes of `key`, shortest first.
  std::vector<Match> common_prefix_search(std::string_view key) const;

 private:
  std::vector<std::uint32_t> units_;
  std::string normalized_;
};

std::string base64_decode(std::string_view encoded);

}  // namespace dimasr::text
