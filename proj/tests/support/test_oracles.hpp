// Independent oracles for the test suites: literal quantified-definition scans
// and brute-force double loops. Deliberately quadratic and unclever so they
// stay a different computation path from the online detectors they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rwre/path.hpp"
#include "rwre/regeneration.hpp"

namespace rwre::testing {

// O(horizon^2) regeneration scan applying the definition bullets directly,
// with the same finite-horizon confirmation policy as the online detector.
inline RegenerationRecord brute_force_regenerations(const WalkPath& path, const Direction& dir,
                                                    const MarginPolicy& policy) {
  RegenerationRecord rec;
  rec.direction = dir;
  rec.path_horizon = path.horizon();
  const std::int64_t H = path.horizon();
  const double end_proj = dir.project(path.at(H));
  const std::int64_t margin = policy.margin.value_or(0);
  const std::int64_t tail_cut =
      policy.margin ? H
                    : H - static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(H))));

  const std::int64_t t_first = dir.kind == Direction::Kind::E1 ? 0 : 1;
  for (std::int64_t t = t_first; t <= H; ++t) {
    const double level = dir.project(path.at(t));
    bool candidate = true;
    if (dir.kind == Direction::Kind::E1) {
      for (std::int64_t s = 0; s < t; ++s)
        if (!(dir.project(path.at(s)) < level)) candidate = false;
    } else {
      const double prev = dir.project(path.at(t - 1));
      for (std::int64_t s = 0; s < t - 1; ++s)
        if (!(dir.project(path.at(s)) <= prev)) candidate = false;
      if (!(level > prev)) candidate = false;
    }
    if (!candidate) continue;
    bool future_ok = true;
    for (std::int64_t s = t + 1; s <= H; ++s)
      if (dir.project(path.at(s)) < level) future_ok = false;
    if (!future_ok) continue;
    const bool advanced =
        end_proj > level && end_proj - level >= static_cast<double>(margin);
    if (advanced && t <= tail_cut)
      rec.confirmed_times.push_back(t);
    else
      rec.censored_candidates.push_back(t);
  }
  return rec;
}

// Brute-force pairwise intersection computations.
inline std::vector<Site> brute_force_common_sites(const WalkPath& p1, const WalkPath& p2) {
  std::vector<Site> out;
  for (std::int64_t i = 0; i <= p1.horizon(); ++i) {
    bool in_second = false;
    for (std::int64_t j = 0; j <= p2.horizon(); ++j)
      if (p1.at(i) == p2.at(j)) in_second = true;
    if (in_second) {
      bool already = false;
      for (const Site& s : out)
        if (s == p1.at(i)) already = true;
      if (!already) out.push_back(p1.at(i));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::int64_t brute_force_count_IN(const WalkPath& p1, const WalkPath& p2, std::int64_t N) {
  std::int64_t count = 0;
  for (std::int64_t i = 0; i <= N; ++i)
    for (std::int64_t j = 0; j <= N; ++j)
      if (p1.at(i) == p2.at(j)) ++count;
  return count;
}

// Random nearest-neighbor path generator for property tests. `drift_bias`
// tilts steps toward +e1 so regeneration-rich paths are easy to produce.
inline WalkPath random_path(std::uint64_t seed, int dim, std::int64_t horizon,
                            double drift_bias = 0.0) {
  RngStream stream(seed);
  std::vector<int> dirs;
  dirs.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t) {
    if (drift_bias > 0.0 && stream.next_unit() < drift_bias) {
      dirs.push_back(0);
      continue;
    }
    dirs.push_back(static_cast<int>(stream.next_unit() * 2.0 * dim) % (2 * dim));
  }
  return WalkPath::from_steps(Site::zero(dim), dirs);
}

}  // namespace rwre::testing
