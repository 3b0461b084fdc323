#include "rwre/regeneration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/environment.hpp"
#include "rwre/walk.hpp"

namespace rwre {

Direction Direction::e1() {
  Direction d;
  d.kind = Kind::E1;
  return d;
}

Direction Direction::along(std::vector<double> v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (!(norm2 > 0.0)) throw std::invalid_argument("Direction: zero direction vector");
  Direction d;
  d.kind = Kind::V;
  d.v = std::move(v);
  // Deterministic orthogonal unit vector: Gram-Schmidt on the basis vector
  // least aligned with v.
  const std::size_t n = d.v.size();
  d.u.assign(n, 0.0);
  if (n >= 2) {
    std::size_t pick = 0;
    double best = std::abs(d.v[0]);
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(d.v[i]) < best) {
        best = std::abs(d.v[i]);
        pick = i;
      }
    for (std::size_t i = 0; i < n; ++i) d.u[i] = -d.v[pick] * d.v[i] / norm2;
    d.u[pick] += 1.0;
    double unorm = 0.0;
    for (double x : d.u) unorm += x * x;
    unorm = std::sqrt(unorm);
    for (double& x : d.u) x /= unorm;
  }
  return d;
}

namespace {

struct Candidate {
  std::int64_t t;
  double level;
};

}  // namespace

RegenerationRecord detect_regenerations(const WalkPath& path, const Direction& direction,
                                        const MarginPolicy& policy) {
  if (direction.kind == Direction::Kind::V &&
      direction.v.size() != static_cast<std::size_t>(path.dim()))
    throw std::invalid_argument("detect_regenerations: direction dimension mismatch");

  const std::int64_t horizon = path.horizon();
  RegenerationRecord rec;
  rec.direction = direction;
  rec.path_horizon = horizon;

  // Candidates carry strictly increasing levels, so one backward sweep kills
  // every candidate whose level the walk later undercuts.
  std::vector<Candidate> alive;
  double running_max = direction.project(path.at(0));  // max over s <= t-1
  double prev_max = running_max;                       // max over s <= t-2

  if (direction.kind == Direction::Kind::E1)
    alive.push_back({0, running_max});  // t = 0: past constraint vacuous

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double proj = direction.project(path.at(t));
    while (!alive.empty() && proj < alive.back().level) alive.pop_back();

    bool is_candidate = false;
    if (direction.kind == Direction::Kind::E1) {
      is_candidate = proj > running_max;
    } else {
      const double prev = direction.project(path.at(t - 1));
      is_candidate = prev >= prev_max && proj > prev;
    }
    if (is_candidate) alive.push_back({t, proj});

    prev_max = running_max;
    running_max = std::max(running_max, proj);
  }

  const double end_proj = direction.project(path.at(horizon));
  const std::int64_t margin = policy.margin.value_or(0);
  const std::int64_t tail_cut =
      policy.margin ? horizon
                    : horizon - static_cast<std::int64_t>(
                                    std::ceil(std::sqrt(static_cast<double>(horizon))));
  for (const Candidate& c : alive) {
    const bool advanced =
        end_proj > c.level && end_proj - c.level >= static_cast<double>(margin);
    if (advanced && c.t <= tail_cut)
      rec.confirmed_times.push_back(c.t);
    else
      rec.censored_candidates.push_back(c.t);
  }
  return rec;
}

std::vector<RegenerationGap> regeneration_gaps(const RegenerationRecord& record,
                                               const WalkPath& path) {
  std::vector<RegenerationGap> gaps;
  const auto& ts = record.confirmed_times;
  if (ts.size() < 2) return gaps;
  gaps.reserve(ts.size() - 1);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    RegenerationGap g;
    g.dt = ts[k + 1] - ts[k];
    const Site& a = path.at(ts[k]);
    const Site& b = path.at(ts[k + 1]);
    g.dx = Site::zero(path.dim());
    for (int i = 0; i < path.dim(); ++i) g.dx[i] = b[i] - a[i];
    gaps.push_back(g);
  }
  return gaps;
}

std::vector<MomentEstimate> estimate_gap_moments(std::span<const RegenerationGap> gaps,
                                                 std::span<const double> orders) {
  if (gaps.empty()) throw std::invalid_argument("estimate_gap_moments: empty gap sample");
  const std::int64_t n = static_cast<std::int64_t>(gaps.size());
  std::vector<MomentEstimate> out;
  out.reserve(orders.size());
  std::vector<double> powered(gaps.size());
  for (double r : orders) {
    double sum = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      powered[i] = std::pow(static_cast<double>(gaps[i].dt), r);
      sum += powered[i];
    }
    const double mean = sum / static_cast<double>(n);
    // Delete-one jackknife of the sample mean.
    double se = 0.0;
    if (n > 1) {
      double ss = 0.0;
      for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double loo = (sum - powered[i]) / static_cast<double>(n - 1);
        ss += (loo - mean) * (loo - mean);
      }
      se = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    }
    out.push_back(MomentEstimate{r, mean, se, n});
  }
  return out;
}

bool check_event_D(const WalkPath& path, const Direction& direction) {
  const double level0 = direction.project(path.at(0));
  for (std::int64_t t = 1; t <= path.horizon(); ++t)
    if (direction.project(path.at(t)) < level0) return false;
  return true;
}

ConditionedSample sample_conditioned_on_D(const EnvDistribution& dist, std::int64_t horizon,
                                          std::int64_t max_attempts, std::uint64_t seed) {
  if (max_attempts < 1)
    throw std::invalid_argument("sample_conditioned_on_D: max_attempts must be >= 1");
  const Direction dir = Direction::e1();
  const Site origin = Site::zero(dist.dim());
  ConditionedSample result;
  for (std::int64_t attempt = 0; attempt < max_attempts; ++attempt) {
    LazyEnvironment env(dist,
                        derive_key(seed, StreamRole::Rejection, attempt, StreamRole::Environment));
    WalkPath path = simulate_path(
        env, origin, horizon, derive_key(seed, StreamRole::Rejection, attempt, StreamRole::Walk1));
    ++result.attempts;
    if (check_event_D(path, dir)) {
      result.path = std::move(path);
      return result;
    }
  }
  return result;  // rejection-exhausted: path empty
}

}  // namespace rwre
