#include "dimasr/data/va_pair.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::data {

namespace {

void check_range(double value, std::string_view dimension) {
  if (!std::isfinite(value) || value < kMinScore || value > kMaxScore) {
    throw DataError(fmt::format("{} out of range [1, 9]: {}", dimension, value));
  }
}

double clip(double value) noexcept {
  if (std::isnan(value)) return kMidScore;
  return std::clamp(value, kMinScore, kMaxScore);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

VAPair::VAPair(double valence, double arousal) : valence_(valence), arousal_(arousal) {
  check_range(valence, "valence");
  check_range(arousal, "arousal");
}

VAPair VAPair::clipped(double valence, double arousal) noexcept {
  return VAPair(clip(valence), clip(arousal), Unchecked{});
}

double parse_real(std::string_view text) {
  const std::string_view body = trim(text);
  if (body.empty()) {
    throw DataError("empty numeric field");
  }
  std::string_view digits = body;
  // from_chars rejects a leading '+'.
  if (digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value,
                                         std::chars_format::fixed);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw DataError(fmt::format("not a number: '{}'", body));
  }
  return value;
}

VAPair parse_va_string(std::string_view text) {
  const auto hash = text.find('#');
  if (hash == std::string_view::npos) {
    throw DataError(fmt::format("VA string '{}' is missing the '#' separator", text));
  }
  if (text.find('#', hash + 1) != std::string_view::npos) {
    throw DataError(fmt::format("VA string '{}' has more than two fields", text));
  }
  const double valence = parse_real(text.substr(0, hash));
  const double arousal = parse_real(text.substr(hash + 1));
  return VAPair(valence, arousal);
}

std::string format_va_string(const VAPair& pair) {
  return fmt::format("{:.2f}#{:.2f}", pair.valence(), pair.arousal());
}

}  // namespace dimasr::data
