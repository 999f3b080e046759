#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>

namespace evpq {

/// Seeded pseudo-random source used by every synthetic generator.
///
/// Engine: std::mt19937_64 (its output sequence is fixed by the C++ standard).
/// Uniform reals take the top 53 bits of one draw; bounded integers use
/// rejection sampling; normals use the basic Box-Muller transform with the
/// sine branch cached for the next call. None of the std::*_distribution
/// adaptors are used because their output differs between standard libraries.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  /// Standard normal deviate.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace evpq
