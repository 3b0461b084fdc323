// Regeneration-time detection in direction e1 and in a general direction v,
// inter-regeneration gaps and their moments, and sampling conditioned on the
// no-backtracking event D.
//
// A time t regenerates in direction e1 when its projection level is a strict
// record over the past and is never undercut afterwards. In direction v the
// three-part definition applies: the level at t-1 weakly dominates everything
// before it, the step into t strictly increases the projection, and nothing
// after t drops below the level at t. Time 0 is admissible for e1 (there it is
// exactly the event D) but excluded for v, which needs a step into t.
//
// Finite horizons cannot certify the infinite future, so detection confirms a
// candidate only when (a) the projection never drops below its level up to the
// horizon, and (b) the end-of-horizon projection sits strictly above the level
// and at least `margin` above it. Candidates alive at the horizon that fail
// (b) are reported as censored, not confirmed. The default policy uses margin
// 0 plus censoring of the trailing ceil(sqrt(horizon)) time units.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwre/env_dist.hpp"
#include "rwre/path.hpp"

namespace rwre {

struct Direction {
  enum class Kind { E1, V };
  Kind kind = Kind::E1;
  std::vector<double> v;  // V only
  std::vector<double> u;  // a unit vector orthogonal to v, fixed deterministically

  static Direction e1();
  static Direction along(std::vector<double> v);  // throws on a zero vector

  double project(const Site& s) const {
    return kind == Kind::E1 ? static_cast<double>(s[0]) : dot(s, v);
  }
};

struct MarginPolicy {
  // Explicit confirmation margin; empty selects the default policy
  // (margin 0 + sqrt-tail discard).
  std::optional<std::int64_t> margin;
};

struct RegenerationRecord {
  Direction direction;
  std::vector<std::int64_t> confirmed_times;      // strictly increasing
  std::vector<std::int64_t> censored_candidates;  // alive at horizon, unconfirmed
  std::int64_t path_horizon = 0;
};

RegenerationRecord detect_regenerations(const WalkPath& path, const Direction& direction,
                                        const MarginPolicy& policy = {});

struct RegenerationGap {
  std::int64_t dt = 0;
  Site dx;
};

// Gaps between consecutive confirmed times, excluding the initial segment
// [0, t^(1)] whose law differs. Fewer than two confirmed times gives {}.
std::vector<RegenerationGap> regeneration_gaps(const RegenerationRecord& record,
                                               const WalkPath& path);

struct MomentEstimate {
  double order = 0.0;
  double point_estimate = 0.0;
  double standard_error = 0.0;  // leave-one-out jackknife
  std::int64_t sample_size = 0;
};

std::vector<MomentEstimate> estimate_gap_moments(std::span<const RegenerationGap> gaps,
                                                 std::span<const double> orders);

// True iff the directional projection never drops below its starting level
// within the horizon.
bool check_event_D(const WalkPath& path, const Direction& direction);

struct ConditionedSample {
  std::optional<WalkPath> path;  // empty when every attempt was rejected
  std::int64_t attempts = 0;
};

// Rejection sampling of (environment, walk) until event D holds in direction
// e1. Exact conditional law; the attempt count doubles as a P(D) estimate.
ConditionedSample sample_conditioned_on_D(const EnvDistribution& dist, std::int64_t horizon,
                                          std::int64_t max_attempts, std::uint64_t seed);

}  // namespace rwre
