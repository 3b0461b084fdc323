// Lattice sites of Z^d with a fixed small dimension cap so hot loops stay
// allocation-free. The cap is a desk-scale artifact bound, checked wherever a
// dimension enters from config.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>

#include "rwre/rng.hpp"

namespace rwre {

inline constexpr int kMaxDim = 8;

struct Site {
  std::array<std::int32_t, kMaxDim> c{};
  int dim = 0;

  static Site zero(int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("Site: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    Site s;
    s.dim = d;
    return s;
  }

  std::int32_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  std::int32_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  bool operator==(const Site& o) const {
    if (dim != o.dim) return false;
    for (int i = 0; i < dim; ++i)
      if (c[static_cast<std::size_t>(i)] != o.c[static_cast<std::size_t>(i)]) return false;
    return true;
  }
  bool operator!=(const Site& o) const { return !(*this == o); }

  // Lexicographic, for deterministic ordering of site collections.
  bool operator<(const Site& o) const {
    for (int i = 0; i < dim && i < o.dim; ++i) {
      if (c[static_cast<std::size_t>(i)] != o.c[static_cast<std::size_t>(i)])
        return c[static_cast<std::size_t>(i)] < o.c[static_cast<std::size_t>(i)];
    }
    return dim < o.dim;
  }

  Site offset(int axis, std::int32_t delta) const {
    Site s = *this;
    s.c[static_cast<std::size_t>(axis)] += delta;
    return s;
  }
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    std::uint64_t h = mix64(0x5174e5u + static_cast<std::uint64_t>(s.dim));
    for (int i = 0; i < s.dim; ++i)
      h = fold(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(s.c[static_cast<std::size_t>(i)])));
    return static_cast<std::size_t>(h);
  }
};

inline std::int64_t l1_dist(const Site& a, const Site& b) {
  std::int64_t d = 0;
  for (int i = 0; i < a.dim; ++i) d += std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
  return d;
}

// Sup-norm distance (the paper-side ||.|| convention).
inline std::int64_t linf_dist(const Site& a, const Site& b) {
  std::int64_t d = 0;
  for (int i = 0; i < a.dim; ++i) {
    const std::int64_t v = std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
    if (v > d) d = v;
  }
  return d;
}

inline std::int64_t proj_e1(const Site& s) { return s[0]; }

inline double dot(const Site& s, std::span<const double> v) {
  double r = 0.0;
  for (int i = 0; i < s.dim; ++i) r += static_cast<double>(s[i]) * v[static_cast<std::size_t>(i)];
  return r;
}

}  // namespace rwre
