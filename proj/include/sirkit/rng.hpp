#pragma once
// Deterministic randomness: splitmix64 streams and FNV-1a hashing.
// All randomness in the toolkit flows through these so that results are
// reproducible across platforms (no std::uniform_* distributions).

#include <cstdint>
#include <string_view>

namespace sirkit {

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo bias is negligible for the small bounds used here.
  uint64_t bounded(uint64_t n) { return n == 0 ? 0 : next() % n; }

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform01() < p; }

 private:
  uint64_t state_;
};

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

inline uint64_t fnv1a64_u64(uint64_t v, uint64_t h) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  return fnv1a64(b, 8, h);
}

// Sub-seed derivation. Keyed by name so adding a stream does not perturb
// existing ones: derive(seed, "campaign-run", i) etc.
inline uint64_t derive_seed(uint64_t seed, std::string_view key, uint64_t index = 0) {
  return mix64(seed ^ fnv1a64(key) ^ mix64(index + 1));
}

}  // namespace sirkit
