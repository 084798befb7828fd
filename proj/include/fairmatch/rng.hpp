#pragma once

#include <cstdint>

namespace fairmatch {

// SplitMix64 generator (Steele/Lea/Vigna). Used instead of std:: engines so
// that every random decision in the library replays bit-exactly from a seed,
// independent of platform and standard-library version.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double nextUnit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling keeps the
  // distribution exactly uniform.
  std::uint64_t nextBelow(std::uint64_t bound) {
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    for (;;) {
      std::uint64_t z = next();
      if (z < limit) return z % bound;
    }
  }

 private:
  std::uint64_t state_;
};

// Independent stream derived from (seed, salt). One extra mixing step
// decorrelates streams whose seeds or salts differ only in a few bits.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ull * (salt + 1)));
  return SplitMix64(mixer.next());
}

// Convenience: a fresh 64-bit seed for substream `salt` of `seed`.
inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t salt) {
  return substream(seed, salt).next();
}

}  // namespace fairmatch
