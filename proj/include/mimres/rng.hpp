#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mimres {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// mt19937_64 with a platform-independent mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derives an independent stream for (seed, purpose).
  static Rng stream(std::uint64_t seed, std::uint64_t purpose) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(purpose + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-free simple rejection keeps the mapping portable.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mimres
