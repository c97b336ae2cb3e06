#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace dimasr {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Derives an independent sub-seed for a named random stream ("split",
/// "shuffle", "init", ...) from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) noexcept;

/// Seeded generator with platform-independent draws. The engine is the
/// standard Mersenne twister; the distributions are written out here because
/// the standard ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n); n must be > 0.
  std::size_t below(std::size_t n);

  /// Standard normal (Box-Muller, one value per call).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dimasr
