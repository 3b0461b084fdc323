#include "rwre/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/estimators.hpp"
#include "rwre/parallel.hpp"
#include "rwre/walk.hpp"

namespace rwre {

namespace {

// First time the projection on e1 strictly exceeds `level`; empty if never.
std::optional<std::int64_t> first_entry_time(const WalkPath& path, std::int64_t level) {
  for (std::int64_t t = 0; t <= path.horizon(); ++t)
    if (proj_e1(path.at(t)) > level) return t;
  return std::nullopt;
}

bool segments_intersect(const WalkPath& p1, std::int64_t a1, std::int64_t b1, const WalkPath& p2,
                        std::int64_t a2, std::int64_t b2) {
  SiteSet seen;
  for (std::int64_t t = a1; t <= b1; ++t) seen.insert(p1.at(t));
  for (std::int64_t t = a2; t <= b2; ++t)
    if (seen.count(p2.at(t))) return true;
  return false;
}

}  // namespace

VisitIndex build_visit_index(const WalkPath& path, std::int64_t up_to) {
  VisitIndex index;
  const std::int64_t last = up_to < 0 ? path.horizon() : std::min(up_to, path.horizon());
  index.reserve(static_cast<std::size_t>(last) + 1);
  for (std::int64_t t = 0; t <= last; ++t)
    index[path.at(t)].push_back(static_cast<std::int32_t>(t));
  return index;
}

std::vector<Site> intersection_points(const WalkPath& path1, const WalkPath& path2) {
  if (path1.dim() != path2.dim())
    throw std::invalid_argument("intersection_points: dimension mismatch");
  SiteSet sites1;
  for (const Site& s : path1.positions) sites1.insert(s);
  SiteSet common;
  for (const Site& s : path2.positions)
    if (sites1.count(s)) common.insert(s);
  std::vector<Site> out(common.begin(), common.end());
  std::sort(out.begin(), out.end());
  return out;
}

HalfSpaceEvent event_WK(const WalkPath& path1, const WalkPath& path2, std::int64_t K) {
  SiteSet sites1;
  for (const Site& s : path1.positions)
    if (proj_e1(s) > K) sites1.insert(s);
  for (const Site& s : path2.positions)
    if (proj_e1(s) > K && sites1.count(s)) return {K, true};
  return {K, false};
}

std::int64_t count_IN(const WalkPath& path1, const WalkPath& path2, std::int64_t N) {
  if (N > path1.horizon() || N > path2.horizon())
    throw std::invalid_argument("count_IN: N exceeds a path horizon");
  const VisitIndex index1 = build_visit_index(path1, N);
  std::int64_t count = 0;
  for (std::int64_t j = 0; j <= N; ++j) {
    auto it = index1.find(path2.at(j));
    if (it != index1.end()) count += static_cast<std::int64_t>(it->second.size());
  }
  return count;
}

ClosestIntersectionDistances closest_intersection_distances(const WalkPath& path1,
                                                            const WalkPath& path2) {
  ClosestIntersectionDistances out;
  for (const Site& z : intersection_points(path1, path2)) {
    const std::int64_t d1 = linf_dist(z, path1.start);
    const std::int64_t d2 = linf_dist(z, path2.start);
    if (!out.from_start1 || d1 < *out.from_start1) out.from_start1 = d1;
    if (!out.from_start2 || d2 < *out.from_start2) out.from_start2 = d2;
  }
  return out;
}

EventStatus event_A_R(const WalkPath& path1, const WalkPath& path2, std::int64_t R) {
  if (proj_e1(path1.start) != 0 || proj_e1(path2.start) != 0)
    throw std::invalid_argument("event_A_R: both starts must lie on the level-0 hyperplane");
  const auto t1 = first_entry_time(path1, R);
  const auto t2 = first_entry_time(path2, R);
  // Violations observed before an (possibly unreached) entry already decide
  // the event; only an undecided event with a missing entry is censored.
  const std::int64_t pre1 = t1 ? *t1 - 1 : path1.horizon();
  const std::int64_t pre2 = t2 ? *t2 - 1 : path2.horizon();
  for (std::int64_t t = 0; t <= pre1; ++t)
    if (proj_e1(path1.at(t)) < 0) return EventStatus::DidNotOccur;
  for (std::int64_t t = 0; t <= pre2; ++t)
    if (proj_e1(path2.at(t)) < 0) return EventStatus::DidNotOccur;
  if (pre1 >= 0 && pre2 >= 0 && segments_intersect(path1, 0, pre1, path2, 0, pre2))
    return EventStatus::DidNotOccur;
  if (!t1 || !t2) return EventStatus::Censored;
  return EventStatus::Occurred;
}

EventStatus event_B_R(const WalkPath& path, const RegenerationRecord& record, std::int64_t R) {
  bool censored = false;
  const std::int64_t lo = (R + 1) / 2;  // ceil(R/2)
  for (std::int64_t n = lo; n <= R; ++n) {
    const auto entry = first_entry_time(path, n);
    if (!entry) {
      censored = true;
      continue;
    }
    if (std::binary_search(record.confirmed_times.begin(), record.confirmed_times.end(), *entry))
      return EventStatus::Occurred;
  }
  return censored ? EventStatus::Censored : EventStatus::DidNotOccur;
}

EventStatus event_S_k(const WalkPath& path1, const WalkPath& path2, std::int64_t w,
                      std::int64_t k) {
  if (w < 1) throw std::invalid_argument("event_S_k: slab width must be >= 1");
  const std::int64_t low = k * w;
  const std::int64_t high = (k + 1) * w;
  const auto a1 = first_entry_time(path1, low);
  const auto b1 = first_entry_time(path1, high);
  const auto a2 = first_entry_time(path2, low);
  const auto b2 = first_entry_time(path2, high);
  if (!a1 || !b1 || !a2 || !b2) return EventStatus::Censored;
  for (std::int64_t t = *a1; t < *b1; ++t)
    if (proj_e1(path1.at(t)) <= low) return EventStatus::DidNotOccur;
  for (std::int64_t t = *a2; t < *b2; ++t)
    if (proj_e1(path2.at(t)) <= low) return EventStatus::DidNotOccur;
  if (segments_intersect(path1, *a1, *b1 - 1, path2, *a2, *b2 - 1))
    return EventStatus::DidNotOccur;
  return EventStatus::Occurred;
}

IntersectionReport analyze_intersections(const WalkPath& path1, const WalkPath& path2,
                                         std::int64_t N) {
  IntersectionReport rep;
  rep.common_sites = intersection_points(path1, path2);
  rep.first_meet_distance = closest_intersection_distances(path1, path2);
  rep.I_N = count_IN(path1, path2, N);
  return rep;
}

WKDecayResult estimate_WK_decay(const EnvDistribution& dist,
                                const std::vector<std::int64_t>& K_grid, std::int64_t replicas,
                                std::int64_t horizon, std::uint64_t seed, int threads) {
  if (replicas < 100) throw std::invalid_argument("estimate_WK_decay: need replicas >= 100");
  if (K_grid.empty() || K_grid.size() > 64)
    throw std::invalid_argument("estimate_WK_decay: K grid must hold 1..64 levels");
  for (std::size_t i = 1; i < K_grid.size(); ++i)
    if (K_grid[i] <= K_grid[i - 1])
      throw std::invalid_argument("estimate_WK_decay: K grid must be strictly increasing");

  struct ReplicaOut {
    std::uint64_t hits = 0;   // bit per K index
    std::uint64_t shorts = 0;
  };
  std::vector<ReplicaOut> per_replica(static_cast<std::size_t>(replicas));

  parallel_replicas(replicas, threads, [&](std::int64_t r) {
    const Site origin = Site::zero(dist.dim());
    LazyEnvironment env(dist, derive_key(seed, StreamRole::Environment, r));
    const WalkPath p1 =
        simulate_path(env, origin, horizon, derive_key(seed, StreamRole::Walk1, r));
    const WalkPath p2 =
        simulate_path(env, origin, horizon, derive_key(seed, StreamRole::Walk2, r));
    std::int64_t max1 = 0, max2 = 0;
    for (const Site& s : p1.positions) max1 = std::max(max1, proj_e1(s));
    for (const Site& s : p2.positions) max2 = std::max(max2, proj_e1(s));
    ReplicaOut out;
    for (std::size_t ki = 0; ki < K_grid.size(); ++ki) {
      if (event_WK(p1, p2, K_grid[ki]).occurred) out.hits |= (1ull << ki);
      if (max1 <= 2 * K_grid[ki] || max2 <= 2 * K_grid[ki]) out.shorts |= (1ull << ki);
    }
    per_replica[static_cast<std::size_t>(r)] = out;
  });

  WKDecayResult result;
  std::vector<double> xs, ps, ses;
  for (std::size_t ki = 0; ki < K_grid.size(); ++ki) {
    WKDecayRow row;
    row.K = K_grid[ki];
    row.replicas = replicas;
    for (const auto& out : per_replica) {
      if (out.hits & (1ull << ki)) ++row.successes;
      if (out.shorts & (1ull << ki)) ++row.short_runs;
    }
    row.p_hat = static_cast<double>(row.successes) / static_cast<double>(replicas);
    row.stderr_p =
        std::sqrt(row.p_hat * (1.0 - row.p_hat) / static_cast<double>(replicas));
    row.excluded = row.successes == 0;
    if (!row.excluded) {
      xs.push_back(static_cast<double>(row.K));
      ps.push_back(row.p_hat);
      ses.push_back(row.stderr_p);
    }
    result.rows.push_back(row);
  }
  if (xs.size() >= 2)
    result.fit = fit_tail_exponent(xs, ps, ses);
  else
    result.degenerate = true;
  return result;
}

}  // namespace rwre
