#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace dcb {

/// Seeded 64-bit generator with fixed conversions, so sequences depend only on
/// the seed words and not on the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng({seed}) {}
  Rng(std::initializer_list<std::uint64_t> words) {
    const auto expanded = expand(words);
    std::seed_seq seq(expanded.begin(), expanded.end());
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  static std::vector<std::uint32_t> expand(std::initializer_list<std::uint64_t> words) {
    std::vector<std::uint32_t> out;
    for (auto w : words) {
      out.push_back(static_cast<std::uint32_t>(w));
      out.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    return out;
  }

  std::mt19937_64 engine_;
};

}  // namespace dcb
