#include "dimasr/text/charsmap.hpp"

#include <cstring>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "dimasr/common/error.hpp"
#include "dimasr/text/utf8.hpp"

namespace dimasr::text {

std::string base64_decode(std::string_view encoded) {
  std::string clean;
  clean.reserve(encoded.size());
  for (char c : encoded) {
    if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
  }
  if (clean.size() % 4 != 0) throw DataError("base64 input length is not a multiple of 4");
  std::string out(clean.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(clean.data()), static_cast<int>(clean.size()));
  if (n < 0) throw DataError("malformed base64 input");
  std::size_t padding = 0;
  for (auto it = clean.rbegin(); it != clean.rend() && *it == '='; ++it) ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

PrecompiledCharsmap::PrecompiledCharsmap(std::string blob) {
  if (blob.empty()) return;
  if (blob.size() < 4) throw DataError("precompiled charsmap is truncated");
  std::uint32_t trie_size = 0;
  std::memcpy(&trie_size, blob.data(), 4);
  if (trie_size % 4 != 0 || 4 + static_cast<std::size_t>(trie_size) > blob.size()) {
    throw DataError(fmt::format("precompiled charsmap declares a bad trie size {}", trie_size));
  }
  units_.resize(trie_size / 4);
  std::memcpy(units_.data(), blob.data() + 4, trie_size);
  normalized_ = blob.substr(4 + trie_size);
}

PrecompiledCharsmap PrecompiledCharsmap::from_base64(std::string_view encoded) {
  return PrecompiledCharsmap(base64_decode(encoded));
}

namespace {

// Darts-clone unit layout.
bool has_leaf(std::uint32_t unit) { return ((unit >> 8) & 1u) == 1u; }
std::uint32_t value_of(std::uint32_t unit) { return unit & ((1u << 31) - 1); }
std::uint32_t label_of(std::uint32_t unit) { return unit & ((1u << 31) | 0xFFu); }
std::uint32_t offset_of(std::uint32_t unit) { return (unit >> 10) << ((unit & (1u << 9)) >> 6); }

}  // namespace

std::vector<PrecompiledCharsmap::Match> PrecompiledCharsmap::common_prefix_search(std::string_view key) const {
  std::vector<Match> matches;
  if (units_.empty()) return matches;
  std::size_t node = offset_of(units_[0]);
  for (std::size_t i = 0; i < key.size(); ++i) {
    const auto c = static_cast<unsigned char>(key[i]);
    node ^= c;
    if (node >= units_.size()) break;
    const std::uint32_t unit = units_[node];
    if (label_of(unit) != c) break;
    node ^= offset_of(unit);
    if (has_leaf(unit)) {
      if (node >= units_.size()) break;
      matches.push_back({value_of(units_[node]), i + 1});
    }
  }
  return matches;
}

std::string PrecompiledCharsmap::normalize(std::string_view input) const {
  std::string out;
  out.reserve(input.size());
  std::size_t pos = 0;
  while (pos < input.size()) {
    const auto matches = common_prefix_search(input.substr(pos));
    if (!matches.empty()) {
      const Match& longest = matches.back();
      if (longest.value < normalized_.size()) {
        out.append(normalized_.c_str() + longest.value);
        pos += longest.length;
        continue;
      }
    }
    const Decoded d = decode_utf8(input, pos);
    if (d.code_point == kReplacementChar && d.length == 1 && static_cast<unsigned char>(input[pos]) >= 0x80) {
      append_utf8(out, kReplacementChar);
    } else {
      out.append(input.substr(pos, d.length));
    }
    pos += d.length;
  }
  return out;
}

}  // namespace dimasr::text
