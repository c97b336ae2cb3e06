#pragma once

#include <string>
#include <string_view>

namespace dimasr::data {

inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 9.0;
inline constexpr double kMidScore = 5.0;

/// A (valence, arousal) point on the [1, 9] scale. Construction validates
/// the range, so a VAPair in hand is always in bounds.
class VAPair {
 public:
  /// Throws DataError naming the offending dimension when either value is
  /// outside [1, 9] or not finite.
  VAPair(double valence, double arousal);

  /// Projects each value onto [1, 9]. NaN maps to the midpoint.
  static VAPair clipped(double valence, double arousal) noexcept;

  static VAPair midpoint() noexcept { return clipped(kMidScore, kMidScore); }

  double valence() const noexcept { return valence_; }
  double arousal() const noexcept { return arousal_; }

  bool operator==(const VAPair&) const = default;

 private:
  struct Unchecked {};
  VAPair(double valence, double arousal, Unchecked) noexcept
      : valence_(valence), arousal_(arousal) {}

  double valence_;
  double arousal_;
};

/// Parses "V#A". Exactly two '#'-separated decimal fields; values must lie
/// in [1, 9] (no clipping). Throws DataError.
VAPair parse_va_string(std::string_view text);

/// Canonical two-decimal rendering, e.g. "7.50#6.80".
std::string format_va_string(const VAPair& pair);

/// Parses a single decimal real occupying the whole of `text` (surrounding
/// blanks allowed). Throws DataError.
double parse_real(std::string_view text);

}  // namespace dimasr::data
