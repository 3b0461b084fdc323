// Two-walk intersection events and statistics: common sites, the half-space
// events W_K, the time-pair count I_N, closest-intersection distances, the
// non-backtracking/non-intersection events A(R) and B_i(R), the slab event
// S_k diagnostic, and the Monte Carlo W_K decay experiment.
//
// Finite horizons leave some events undecidable; those detectors return a
// tri-state with an explicit Censored outcome.
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rwre/env_dist.hpp"
#include "rwre/estimators_types.hpp"
#include "rwre/path.hpp"
#include "rwre/regeneration.hpp"

namespace rwre {

// Site -> ordered visit times of one path (times <= up_to, -1 for all).
using VisitIndex = std::unordered_map<Site, std::vector<std::int32_t>, SiteHash>;
VisitIndex build_visit_index(const WalkPath& path, std::int64_t up_to = -1);

// Exact set of sites visited by both walks within their horizons, sorted
// lexicographically for deterministic output.
std::vector<Site> intersection_points(const WalkPath& path1, const WalkPath& path2);

struct HalfSpaceEvent {
  std::int64_t K = 0;
  bool occurred = false;
};

// W_K: the walks share a site strictly beyond level K.
HalfSpaceEvent event_WK(const WalkPath& path1, const WalkPath& path2, std::int64_t K);

// |{(i, j) in [0, N]^2 : X1(i) = X2(j)}|. Throws if N exceeds a horizon.
std::int64_t count_IN(const WalkPath& path1, const WalkPath& path2, std::int64_t N);

struct ClosestIntersectionDistances {
  std::optional<std::int64_t> from_start1;  // sup-norm
  std::optional<std::int64_t> from_start2;
};
ClosestIntersectionDistances closest_intersection_distances(const WalkPath& path1,
                                                            const WalkPath& path2);

enum class EventStatus { DidNotOccur = 0, Occurred = 1, Censored = 2 };

// A(R): both walks stay in {<x,e1> >= 0} strictly before their first entry
// into H_R, and the pre-entry segments do not share a site. Requires both
// starts on the level-0 hyperplane; censored when an entry time exceeds the
// horizon.
EventStatus event_A_R(const WalkPath& path1, const WalkPath& path2, std::int64_t R);

// B(R): for some n in [ceil(R/2), R], the first entry into H_n happens at a
// confirmed regeneration time.
EventStatus event_B_R(const WalkPath& path, const RegenerationRecord& record, std::int64_t R);

// Slab event S_k for slab width w: between their entries into H_{kw} and
// H_{(k+1)w}, both walks stay strictly above level kw and the two slab
// segments do not intersect.
EventStatus event_S_k(const WalkPath& path1, const WalkPath& path2, std::int64_t w,
                      std::int64_t k);

// Everything the report type carries, computed in one pass.
struct IntersectionReport {
  std::vector<Site> common_sites;
  ClosestIntersectionDistances first_meet_distance;
  std::int64_t I_N = 0;
};
IntersectionReport analyze_intersections(const WalkPath& path1, const WalkPath& path2,
                                         std::int64_t N);

struct WKDecayRow {
  std::int64_t K = 0;
  std::int64_t successes = 0;
  std::int64_t replicas = 0;
  double p_hat = 0.0;
  double stderr_p = 0.0;
  std::int64_t short_runs = 0;  // replicas where a walk ended short of H_{2K}
  bool excluded = false;        // zero successes: dropped from the fit
};

struct WKDecayResult {
  std::vector<WKDecayRow> rows;
  TailFit fit;
  bool degenerate = false;  // fewer than two usable grid points
};

// Same-environment annealed P(W_K) over a K grid, both walks from the origin,
// with binomial standard errors and a log-log tail fit.
WKDecayResult estimate_WK_decay(const EnvDistribution& dist,
                                const std::vector<std::int64_t>& K_grid, std::int64_t replicas,
                                std::int64_t horizon, std::uint64_t seed, int threads);

}  // namespace rwre
