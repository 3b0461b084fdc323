// Splittable counter-based randomness. Every stream is a window of the
// splitmix64 orbit, keyed by hashing (seed, role, indices...). Derivation is
// pure: a (key, counter) pair maps to one fixed 64-bit word regardless of
// query order or thread schedule, which is what makes environments replayable
// and replica aggregation bitwise reproducible.
#pragma once

#include <cmath>
#include <cstdint>

namespace rwre {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's constants).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Order-sensitive combine, used to fold tuple components into a stream key.
constexpr std::uint64_t fold(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64((h + kGolden) ^ mix64(v + kGolden));
}

// Stream roles keep environment randomness, walk randomness and rejection
// attempts on disjoint keys even when they share a master seed.
enum class StreamRole : std::uint64_t {
  Environment = 1,
  Walk1 = 2,
  Walk2 = 3,
  Rejection = 4,
  Environment2 = 5,
  Environment3 = 6,
  SharedField = 7,
  Pilot = 8,
};

template <class... Parts>
constexpr std::uint64_t derive_key(std::uint64_t seed, Parts... parts) noexcept {
  std::uint64_t h = mix64(seed + kGolden);
  ((h = fold(h, static_cast<std::uint64_t>(parts))), ...);
  return h;
}

class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform in [0, 1), 53 bits of mantissa.
  double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; always consumes exactly two words.
  double next_gaussian() noexcept {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace rwre
