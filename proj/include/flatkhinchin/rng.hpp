#pragma once

#include <cstdint>
#include <string_view>

namespace flatkhinchin {

/// Counter-derived random streams: every (master seed, label, index, attempt)
/// tuple names an independent reproducible stream, so parallel sampling is
/// order-independent.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) from the top 53 bits.
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline SplitMix64 sample_stream(std::uint64_t master, std::string_view label,
                                std::uint64_t index, std::uint64_t attempt = 0) {
  std::uint64_t h = master;
  h ^= fnv1a(label) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= (index + 1) * 0xD1B54A32D192ED03ULL;
  h ^= (attempt + 1) * 0x8CB92BA72F3D8DD7ULL;
  return SplitMix64(h);
}

}  // namespace flatkhinchin
