// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace papt {

/// Identifier embedded in all output metadata so results can be re-derived
/// bit-exactly. Bump only with an algorithm change.
inline constexpr std::string_view kRngAlgorithm = "splitmix64ctr-v1";

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kStreamMult = 0xD1342543DE82EF95ULL;

// SplitMix64 finalizer (Vigna / Steele-Lea-Flood). Bijective on u64.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derived seed for replica `index` of stream `base`. Injective in `index`
/// for any fixed base (odd multiplier, bijective finalizer), stable across
/// platforms and versions.
inline std::uint64_t seed_stream(std::uint64_t base, std::uint64_t index) {
  return detail::mix64(detail::mix64(base) + (index + 1) * detail::kStreamMult);
}

/// Counter-based generator: output i is mix64(key + golden*(i+1)).
/// Jump-free, trivially splittable via seed_stream, no hidden state beyond
/// (key, counter).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(seed) {}

  std::uint64_t next_u64() { return detail::mix64(key_ + (++ctr_) * detail::kGolden); }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1].
  double uniform_pos() { return 1.0 - uniform(); }

  /// Standard exponential.
  double exponential() { return -std::log(uniform_pos()); }

  /// Standard normal, Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = uniform_pos();
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Gamma(shape, 1) for any shape > 0. Marsaglia-Tsang for shape >= 1,
  /// boosted by U^{1/shape} for shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform_pos();
      if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace papt
