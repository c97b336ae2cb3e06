#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace dimasr::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

/// Decodes the code point starting at `pos`. Malformed or truncated input
/// yields U+FFFD with a length of one byte.
struct Decoded {
  char32_t code_point;
  std::size_t length;
};
Decoded decode_utf8(std::string_view text, std::size_t pos);

/// Byte length of the (possibly malformed) character starting at `pos`.
inline std::size_t utf8_char_length(std::string_view text, std::size_t pos) {
  return decode_utf8(text, pos).length;
}

void append_utf8(std::string& out, char32_t code_point);

bool is_unicode_space(char32_t c);

/// Han, kana, Hangul and the CJK punctuation blocks.
bool is_cjk(char32_t c);

}  // namespace dimasr::text
