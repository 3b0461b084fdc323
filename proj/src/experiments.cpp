#include "rwre/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/walk.hpp"

namespace rwre {

std::uint64_t experiment_key(std::uint64_t master_seed, const std::string& name) {
  std::uint64_t h = mix64(master_seed + kGolden);
  for (char c : name) h = fold(h, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  return h;
}

VectorEstimate pilot_speed(const EnvDistribution& dist, std::int64_t replicas,
                           std::int64_t horizon, std::uint64_t key, int threads) {
  std::vector<Site> endpoints(static_cast<std::size_t>(replicas));
  const Site origin = Site::zero(dist.dim());
  parallel_replicas(replicas, threads, [&](std::int64_t r) {
    LazyEnvironment env(dist, derive_key(key, StreamRole::Pilot, r, StreamRole::Environment));
    WalkPath path;
    simulate_path_into(env, origin, horizon, derive_key(key, StreamRole::Pilot, r, StreamRole::Walk1),
                       path);
    endpoints[static_cast<std::size_t>(r)] = path.at(horizon);
  });
  std::vector<std::pair<Site, std::int64_t>> pairs;
  pairs.reserve(endpoints.size());
  for (const auto& e : endpoints) pairs.emplace_back(e, horizon);
  return estimate_speed(pairs);
}

// ---- simulate ------------------------------------------------------------

SimulateResult compute_simulate(const ExperimentConfig& cfg, int threads) {
  const std::uint64_t ek = experiment_key(cfg.master_seed, "simulate");
  const std::int64_t n = cfg.scale_n.value_or(cfg.horizon);
  if (n < 1 || n > cfg.horizon) throw config_error("simulate: scale_n must lie in [1, horizon]");
  const Site origin = Site::zero(cfg.environment.dim());

  struct Slot {
    Site end_h;
    Site end_n;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.replicas));
  const std::int64_t dump_limit =
      cfg.path_dump.format == "none" ? 0 : std::min(cfg.path_dump.limit, cfg.replicas);
  std::vector<WalkPath> dumped(static_cast<std::size_t>(dump_limit));

  parallel_replicas(cfg.replicas, threads, [&](std::int64_t r) {
    LazyEnvironment env(cfg.environment, derive_key(ek, StreamRole::Environment, r));
    WalkPath path;
    simulate_path_into(env, origin, cfg.horizon, derive_key(ek, StreamRole::Walk1, r), path);
    slots[static_cast<std::size_t>(r)] = Slot{path.at(cfg.horizon), path.at(n)};
    if (r < dump_limit) dumped[static_cast<std::size_t>(r)] = path;
  });

  SimulateResult res;
  res.scale_n = n;
  res.dumped_paths = std::move(dumped);
  std::vector<std::pair<Site, std::int64_t>> endpoints;
  endpoints.reserve(slots.size());
  for (const auto& s : slots) endpoints.emplace_back(s.end_h, cfg.horizon);
  res.speed = estimate_speed(endpoints);
  res.speed_from_config = cfg.speed.has_value();
  res.speed_used = cfg.speed.value_or(res.speed.value);

  std::vector<std::vector<double>> rows;
  rows.reserve(slots.size());
  for (const auto& s : slots) rows.push_back(scaled_endpoint(s.end_n, n, res.speed_used));
  res.covariance = sample_covariance(rows);
  return res;
}

// ---- regen ---------------------------------------------------------------

namespace {

// Per-replica sufficient statistics for one direction's gap sequence; the
// full gap list never has to stay resident.
struct GapSums {
  std::int64_t confirmed = 0;
  std::int64_t censored = 0;
  std::int64_t count = 0;
  double dt = 0.0;
  double dt2 = 0.0;
  std::vector<double> dt_pow;        // sum dt^r per requested order
  std::vector<double> dt_pow2;       // sum dt^(2r)
  std::array<double, kMaxDim> dx{};  // sums of displacement components
  std::array<double, kMaxDim> dx2{};
  std::array<double, kMaxDim> dxdt{};
  double adj = 0.0;                  // sum of adjacent dt products within the path
  double adj_first = 0.0, adj_second = 0.0;
  std::int64_t adj_pairs = 0;

  void accumulate(const RegenerationRecord& rec, const WalkPath& path,
                  std::span<const double> orders) {
    confirmed += static_cast<std::int64_t>(rec.confirmed_times.size());
    censored += static_cast<std::int64_t>(rec.censored_candidates.size());
    if (dt_pow.empty()) {
      dt_pow.assign(orders.size(), 0.0);
      dt_pow2.assign(orders.size(), 0.0);
    }
    const auto gaps = regeneration_gaps(rec, path);
    for (std::size_t k = 0; k < gaps.size(); ++k) {
      const double t = static_cast<double>(gaps[k].dt);
      ++count;
      dt += t;
      dt2 += t * t;
      for (std::size_t oi = 0; oi < orders.size(); ++oi) {
        const double p = std::pow(t, orders[oi]);
        dt_pow[oi] += p;
        dt_pow2[oi] += p * p;
      }
      for (int i = 0; i < path.dim(); ++i) {
        const double x = static_cast<double>(gaps[k].dx[i]);
        dx[static_cast<std::size_t>(i)] += x;
        dx2[static_cast<std::size_t>(i)] += x * x;
        dxdt[static_cast<std::size_t>(i)] += x * t;
      }
      if (k + 1 < gaps.size()) {
        const double next = static_cast<double>(gaps[k + 1].dt);
        adj += t * next;
        adj_first += t;
        adj_second += next;
        ++adj_pairs;
      }
    }
  }

  void fold(const GapSums& o) {
    confirmed += o.confirmed;
    censored += o.censored;
    count += o.count;
    dt += o.dt;
    dt2 += o.dt2;
    if (dt_pow.empty()) {
      dt_pow = o.dt_pow;
      dt_pow2 = o.dt_pow2;
    } else {
      for (std::size_t i = 0; i < dt_pow.size() && i < o.dt_pow.size(); ++i) {
        dt_pow[i] += o.dt_pow[i];
        dt_pow2[i] += o.dt_pow2[i];
      }
    }
    for (std::size_t i = 0; i < kMaxDim; ++i) {
      dx[i] += o.dx[i];
      dx2[i] += o.dx2[i];
      dxdt[i] += o.dxdt[i];
    }
    adj += o.adj;
    adj_first += o.adj_first;
    adj_second += o.adj_second;
    adj_pairs += o.adj_pairs;
  }
};

DirectionStats direction_stats_from_sums(const std::string& name, const GapSums& sums, int d,
                                         std::span<const double> orders,
                                         const VectorEstimate& speed) {
  DirectionStats st;
  st.name = name;
  st.confirmed_total = sums.confirmed;
  st.censored_total = sums.censored;
  st.gap_count = sums.count;
  if (sums.count == 0) return st;
  const double n = static_cast<double>(sums.count);

  // Moments with the standard-error identity of the delete-one jackknife of
  // a sample mean (s / sqrt(n)), matching estimate_gap_moments.
  for (std::size_t oi = 0; oi < orders.size(); ++oi) {
    MomentEstimate m;
    m.order = orders[oi];
    m.sample_size = sums.count;
    m.point_estimate = sums.dt_pow[oi] / n;
    if (sums.count > 1) {
      const double var =
          (sums.dt_pow2[oi] - n * m.point_estimate * m.point_estimate) / (n - 1.0);
      m.standard_error = std::sqrt(std::max(0.0, var) / n);
    }
    st.moments.push_back(m);
  }

  const double mean_dt = sums.dt / n;
  st.gap_ratio.resize(static_cast<std::size_t>(d));
  st.gap_ratio_se.resize(static_cast<std::size_t>(d));
  st.renewal_gap.resize(static_cast<std::size_t>(d));
  st.renewal_joint_se.resize(static_cast<std::size_t>(d));
  st.renewal_pass = true;
  for (int i = 0; i < d; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    const double ratio = sums.dx[ii] / sums.dt;
    const double resid_ss =
        sums.dx2[ii] - 2.0 * ratio * sums.dxdt[ii] + ratio * ratio * sums.dt2;
    const double se =
        std::sqrt(std::max(0.0, resid_ss) / (n - 1.0)) / (std::sqrt(n) * mean_dt);
    st.gap_ratio[ii] = ratio;
    st.gap_ratio_se[ii] = se;
    const double gap = std::abs(speed.value[ii] - ratio);
    const double joint = std::sqrt(se * se + speed.stderr_[ii] * speed.stderr_[ii]);
    st.renewal_gap[ii] = gap;
    st.renewal_joint_se[ii] = joint;
    if (gap >= 3.0 * joint) st.renewal_pass = false;
  }

  const double denom = sums.dt2 - n * mean_dt * mean_dt;
  if (denom > 0.0 && sums.adj_pairs > 0) {
    const double num = sums.adj - mean_dt * (sums.adj_first + sums.adj_second) +
                       mean_dt * mean_dt * static_cast<double>(sums.adj_pairs);
    st.lag1_autocorr = num / denom;
    st.stationarity_pass = std::abs(st.lag1_autocorr) < 4.0 / std::sqrt(n);
  }
  return st;
}

}  // namespace

RegenResult compute_regen(const ExperimentConfig& cfg, int threads) {
  const std::uint64_t ek = experiment_key(cfg.master_seed, "regen");
  const Site origin = Site::zero(cfg.environment.dim());
  const MarginPolicy policy{cfg.margin};
  const bool want_e1 = cfg.direction == "e1" || cfg.direction == "both";
  const bool want_v = cfg.direction == "v" || cfg.direction == "both";

  // Direction v needs a speed estimate; take it from a first endpoint-only
  // pass (cheap relative to the detection pass) unless configured.
  std::vector<Site> endpoints(static_cast<std::size_t>(cfg.replicas));
  parallel_replicas(cfg.replicas, threads, [&](std::int64_t r) {
    LazyEnvironment env(cfg.environment, derive_key(ek, StreamRole::Environment, r));
    WalkPath path;
    simulate_path_into(env, origin, cfg.horizon, derive_key(ek, StreamRole::Walk1, r), path);
    endpoints[static_cast<std::size_t>(r)] = path.at(cfg.horizon);
  });

  RegenResult res;
  std::vector<std::pair<Site, std::int64_t>> endpoint_pairs;
  for (const auto& e : endpoints) endpoint_pairs.emplace_back(e, cfg.horizon);
  res.speed = estimate_speed(endpoint_pairs);
  res.direction_v = cfg.speed.value_or(res.speed.value);
  const Direction dir_v = want_v ? Direction::along(res.direction_v) : Direction::e1();

  struct ReplicaSums {
    GapSums e1, v;
  };
  std::vector<ReplicaSums> sums(static_cast<std::size_t>(cfg.replicas));
  parallel_replicas(cfg.replicas, threads, [&](std::int64_t r) {
    LazyEnvironment env(cfg.environment, derive_key(ek, StreamRole::Environment, r));
    WalkPath path;
    simulate_path_into(env, origin, cfg.horizon, derive_key(ek, StreamRole::Walk1, r), path);
    ReplicaSums& out = sums[static_cast<std::size_t>(r)];
    if (want_e1)
      out.e1.accumulate(detect_regenerations(path, Direction::e1(), policy), path,
                        cfg.moment_orders);
    if (want_v)
      out.v.accumulate(detect_regenerations(path, dir_v, policy), path, cfg.moment_orders);
  });
  GapSums total_e1, total_v;
  for (const auto& s : sums) {  // replica order, thread-count independent
    total_e1.fold(s.e1);
    total_v.fold(s.v);
  }
  if (want_e1)
    res.directions.push_back(direction_stats_from_sums("e1", total_e1, cfg.dimension,
                                                       cfg.moment_orders, res.speed));
  if (want_v)
    res.directions.push_back(
        direction_stats_from_sums("v", total_v, cfg.dimension, cfg.moment_orders, res.speed));

  // Event-D acceptance rate over independent attempts.
  std::vector<unsigned char> accepted(static_cast<std::size_t>(cfg.attempts));
  const Direction e1 = Direction::e1();
  parallel_replicas(cfg.attempts, threads, [&](std::int64_t a) {
    LazyEnvironment env(cfg.environment,
                        derive_key(ek, StreamRole::Rejection, a, StreamRole::Environment));
    const WalkPath path = simulate_path(
        env, origin, cfg.horizon, derive_key(ek, StreamRole::Rejection, a, StreamRole::Walk1));
    accepted[static_cast<std::size_t>(a)] = check_event_D(path, e1) ? 1 : 0;
  });
  std::int64_t hits = 0;
  for (unsigned char a : accepted) hits += a;
  res.d_attempts = cfg.attempts;
  res.d_rate = static_cast<double>(hits) / static_cast<double>(cfg.attempts);
  res.d_rate_se =
      std::sqrt(res.d_rate * (1.0 - res.d_rate) / static_cast<double>(cfg.attempts));

  const ConditionedSample cs =
      sample_conditioned_on_D(cfg.environment, cfg.horizon, cfg.attempts, derive_key(ek, 99));
  res.sample_attempts_to_accept = cs.attempts;

  // Records table for the first replicas, resimulated from the same streams.
  const std::int64_t dump = std::min<std::int64_t>(cfg.replicas, 100);
  for (std::int64_t r = 0; r < dump; ++r) {
    LazyEnvironment env(cfg.environment, derive_key(ek, StreamRole::Environment, r));
    const WalkPath path =
        simulate_path(env, origin, cfg.horizon, derive_key(ek, StreamRole::Walk1, r));
    res.dumped_records.push_back(detect_regenerations(path, e1, policy));
  }
  return res;
}

// ---- intersect -----------------------------------------------------------

IntersectResult compute_intersect(const ExperimentConfig& cfg, int threads) {
  const std::uint64_t ek = experiment_key(cfg.master_seed, "intersect");
  IntersectResult res;

  const VectorEstimate pilot =
      pilot_speed(cfg.environment, cfg.pilot_replicas, cfg.pilot_horizon, ek, threads);
  res.pilot_speed_value = pilot.value;
  const double v1 = std::max(pilot.value.front(), 0.05);
  const std::int64_t k_max = cfg.k_grid.back();
  const std::int64_t r_max = cfg.r_grid.empty() ? 0 : cfg.r_grid.back();
  const std::int64_t reach = std::max(k_max, r_max);
  res.horizon_used = std::max(
      cfg.horizon, static_cast<std::int64_t>(std::ceil(
                       static_cast<double>(cfg.horizon_multiplier * reach) / v1)));

  res.wk = estimate_WK_decay(cfg.environment, cfg.k_grid, cfg.replicas, res.horizon_used,
                             derive_key(ek, 1), threads);

  // Origin-start same-environment pairs for I_N, B(R) and the slab flag.
  res.in_grid = cfg.in_grid;
  if (res.in_grid.empty())
    res.in_grid = {std::max<std::int64_t>(1, res.horizon_used / 4),
                   std::max<std::int64_t>(1, res.horizon_used / 2), res.horizon_used};
  struct PairOut {
    std::vector<std::int64_t> in_counts;
    std::vector<int> b_status;
    int slab_status = -1;
  };
  std::vector<PairOut> pair_out(static_cast<std::size_t>(cfg.replicas));
  const Site origin = Site::zero(cfg.environment.dim());
  const MarginPolicy policy{cfg.margin};
  parallel_replicas(cfg.replicas, threads, [&](std::int64_t r) {
    LazyEnvironment env(cfg.environment, derive_key(ek, 2, StreamRole::Environment, r));
    const WalkPath p1 =
        simulate_path(env, origin, res.horizon_used, derive_key(ek, 2, StreamRole::Walk1, r));
    const WalkPath p2 =
        simulate_path(env, origin, res.horizon_used, derive_key(ek, 2, StreamRole::Walk2, r));
    PairOut out;
    for (std::int64_t N : res.in_grid) out.in_counts.push_back(count_IN(p1, p2, N));
    if (!cfg.r_grid.empty()) {
      const RegenerationRecord rec = detect_regenerations(p1, Direction::e1(), policy);
      for (std::int64_t R : cfg.r_grid)
        out.b_status.push_back(static_cast<int>(event_B_R(p1, rec, R)));
    }
    if (cfg.slab_w && cfg.slab_k)
      out.slab_status = static_cast<int>(event_S_k(p1, p2, *cfg.slab_w, *cfg.slab_k));
    pair_out[static_cast<std::size_t>(r)] = out;
  });

  res.mean_IN.assign(res.in_grid.size(), 0.0);
  for (const auto& out : pair_out)
    for (std::size_t i = 0; i < res.in_grid.size(); ++i)
      res.mean_IN[i] += static_cast<double>(out.in_counts[i]);
  for (double& m : res.mean_IN) m /= static_cast<double>(cfg.replicas);

  const auto tally = [&](std::int64_t R, auto get_status) {
    EventRateRow row;
    row.R = R;
    for (std::int64_t r = 0; r < cfg.replicas; ++r) {
      switch (get_status(r)) {
        case static_cast<int>(EventStatus::Occurred): ++row.occurred; break;
        case static_cast<int>(EventStatus::DidNotOccur): ++row.not_occurred; break;
        default: ++row.censored; break;
      }
    }
    const std::int64_t decided = row.occurred + row.not_occurred;
    row.rate = decided > 0 ? static_cast<double>(row.occurred) / static_cast<double>(decided) : 0.0;
    return row;
  };

  for (std::size_t ri = 0; ri < cfg.r_grid.size(); ++ri)
    res.b_rates.push_back(tally(cfg.r_grid[ri], [&](std::int64_t r) {
      return pair_out[static_cast<std::size_t>(r)].b_status[ri];
    }));
  if (cfg.slab_w && cfg.slab_k) {
    res.slab_rate = tally(*cfg.slab_k, [&](std::int64_t r) {
      return pair_out[static_cast<std::size_t>(r)].slab_status;
    });
  }

  // A(R) wants both starts on the level-0 hyperplane, transversely separated;
  // the separation scales with R.
  for (std::int64_t R : cfg.r_grid) {
    std::vector<int> status(static_cast<std::size_t>(cfg.replicas));
    parallel_replicas(cfg.replicas, threads, [&](std::int64_t r) {
      LazyEnvironment env(cfg.environment, derive_key(ek, 3, R, StreamRole::Environment, r));
      Site start2 = origin;
      start2[1] = static_cast<std::int32_t>(R);
      const WalkPath p1 =
          simulate_path(env, origin, res.horizon_used, derive_key(ek, 3, R, StreamRole::Walk1, r));
      const WalkPath p2 =
          simulate_path(env, start2, res.horizon_used, derive_key(ek, 3, R, StreamRole::Walk2, r));
      status[static_cast<std::size_t>(r)] = static_cast<int>(event_A_R(p1, p2, R));
    });
    res.a_rates.push_back(
        tally(R, [&](std::int64_t r) { return status[static_cast<std::size_t>(r)]; }));
  }
  return res;
}

// ---- clt -----------------------------------------------------------------

CltResult compute_clt(const ExperimentConfig& cfg, int threads) {
  const std::uint64_t ek = experiment_key(cfg.master_seed, "clt");
  CltResult res;
  res.speed_from_config = cfg.speed.has_value();
  if (cfg.speed) {
    res.speed_used = *cfg.speed;
  } else {
    res.speed_used =
        pilot_speed(cfg.environment, cfg.pilot_replicas, cfg.pilot_horizon, ek, threads).value;
  }
  res.n_grid = cfg.n_grid;
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i)
    res.variances.push_back(quenched_mean_variance(cfg.environment, cfg.functional,
                                                   cfg.n_grid[i], cfg.n_env, cfg.walks_per_env,
                                                   res.speed_used, derive_key(ek, 4, cfg.n_grid[i]),
                                                   threads));

  res.ks_scale_n = cfg.scale_n.value_or(cfg.n_grid.back());
  const Site origin = Site::zero(cfg.environment.dim());
  for (std::int64_t s = 0; s < cfg.ks_env_seeds; ++s) {
    LazyEnvironment env(cfg.environment, derive_key(ek, 5, StreamRole::Environment, s));
    std::vector<double> samples(static_cast<std::size_t>(cfg.ks_walks));
    parallel_replicas(cfg.ks_walks, threads, [&](std::int64_t w) {
      WalkPath path;
      simulate_path_into(env, origin, res.ks_scale_n, derive_key(ek, 5, StreamRole::Walk1, s, w),
                         path);
      samples[static_cast<std::size_t>(w)] =
          scaled_endpoint(path.at(res.ks_scale_n), res.ks_scale_n, res.speed_used).front();
    });
    const KsResult ks = ks_normality_check(samples);
    KsRow row;
    row.env_index = s;
    row.statistic = ks.statistic;
    row.threshold = ks.threshold;
    row.degenerate = ks.degenerate;
    row.pass = !ks.degenerate && ks.statistic < ks.threshold;
    if (row.pass) ++res.ks_passes;
    res.ks_rows.push_back(row);
  }
  return res;
}

// ---- series ----------------------------------------------------------------

SeriesResult compute_series(const ExperimentConfig& cfg, int threads) {
  const std::uint64_t ek = experiment_key(cfg.master_seed, "series");
  SeriesResult res;
  res.speed_from_config = cfg.speed.has_value();
  if (cfg.speed) {
    res.speed_used = *cfg.speed;
  } else {
    res.speed_used =
        pilot_speed(cfg.environment, cfg.pilot_replicas, cfg.pilot_horizon, ek, threads).value;
  }
  res.summary = bs_series_summands(cfg.environment, cfg.functional, cfg.series_b, cfg.series_m_lo,
                                   cfg.series_m_hi, cfg.n_env, cfg.walks_per_env, res.speed_used,
                                   ek, threads);
  std::vector<double> ms, ln_s, sig;
  for (const auto& s : res.summary.summands) {
    if (s.variance.raw_estimate > 0.0 && s.variance.stderr_ > 0.0) {
      ms.push_back(static_cast<double>(s.m));
      ln_s.push_back(std::log(s.variance.raw_estimate));
      sig.push_back(s.variance.stderr_ / s.variance.raw_estimate);
    }
  }
  if (ms.size() >= 2) {
    res.log_slope = weighted_linear_fit(ms, ln_s, sig);
    res.slope_valid = true;
  }
  return res;
}

// ---- oracle ----------------------------------------------------------------

OracleQuenchedResult compute_oracle_quenched(const ExperimentConfig& cfg, int threads) {
  const std::uint64_t ek = experiment_key(cfg.master_seed, "oracle-quenched");
  OracleQuenchedResult res;
  res.start = Site::zero(cfg.environment.dim());
  for (std::size_t i = 0; i < cfg.oracle_start.size(); ++i)
    res.start[static_cast<int>(i)] = static_cast<std::int32_t>(cfg.oracle_start[i]);
  res.horizon = cfg.oracle_horizon;

  LazyEnvironment env(cfg.environment, derive_key(ek, StreamRole::Environment));
  const EndpointLaw law = enumerate_quenched_law(env, res.start, res.horizon);
  for (const auto& [site, prob] : law) {
    res.law.emplace_back(site, prob);
    res.total_mass += prob;
  }
  std::sort(res.law.begin(), res.law.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  res.mc_samples = 100000;
  std::vector<Site> ends(static_cast<std::size_t>(res.mc_samples));
  parallel_replicas(res.mc_samples, threads, [&](std::int64_t i) {
    WalkPath path;
    simulate_path_into(env, res.start, res.horizon, derive_key(ek, StreamRole::Walk1, i), path);
    ends[static_cast<std::size_t>(i)] = path.at(res.horizon);
  });
  std::unordered_map<Site, std::int64_t, SiteHash> freq;
  for (const auto& e : ends) ++freq[e];
  double tv = 0.0;
  for (const auto& [site, prob] : law) {
    const auto it = freq.find(site);
    const double emp =
        it == freq.end() ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(res.mc_samples);
    tv += std::abs(prob - emp);
  }
  for (const auto& [site, count] : freq)
    if (!law.count(site)) tv += static_cast<double>(count) / static_cast<double>(res.mc_samples);
  res.tv_vs_monte_carlo = 0.5 * tv;
  return res;
}

OracleCouplingResult compute_oracle_coupling(const ExperimentConfig& cfg, int /*threads*/) {
  const std::uint64_t ek = experiment_key(cfg.master_seed, "oracle-coupling");
  OracleCouplingResult res;
  const int d = cfg.environment.dim();
  for (std::int64_t trial = 0; trial < cfg.coupling_trials; ++trial) {
    RngStream stream(derive_key(ek, trial));
    const std::int64_t T1 =
        1 + static_cast<std::int64_t>(stream.next_unit() * static_cast<double>(cfg.coupling_horizon));
    const std::int64_t T2 =
        1 + static_cast<std::int64_t>(stream.next_unit() * static_cast<double>(cfg.coupling_horizon));
    const auto random_path = [&](const Site& start, std::int64_t len) {
      std::vector<int> dirs;
      for (std::int64_t t = 0; t < len; ++t)
        dirs.push_back(static_cast<int>(stream.next_unit() * 2.0 * d) % (2 * d));
      return WalkPath::from_steps(start, dirs);
    };
    // Alternate between likely-disjoint and likely-intersecting geometries.
    Site start2 = Site::zero(d);
    start2[1] = (trial % 2 == 0) ? static_cast<std::int32_t>(2 * cfg.coupling_horizon + 1)
                                 : static_cast<std::int32_t>(trial % 3);
    const WalkPath l1 = random_path(Site::zero(d), std::min(T1, cfg.coupling_horizon));
    const WalkPath l2 = random_path(start2, std::min(T2, cfg.coupling_horizon));

    CouplingTrialRow row;
    row.trial = trial;
    row.T1 = l1.horizon();
    row.T2 = l2.horizon();
    SiteSet range1;
    for (const auto& s : l1.positions) range1.insert(s);
    for (const auto& s : l2.positions)
      if (range1.count(s)) row.lambdas_intersect = true;
    row.residual =
        verify_coupling_identity(l1, l2, cfg.environment, l1.horizon(), l2.horizon());
    res.max_residual = std::max(res.max_residual, row.residual);
    res.trials.push_back(row);
  }
  return res;
}

OracleHittingResult compute_oracle_hitting(const ExperimentConfig& cfg, int /*threads*/) {
  OracleHittingResult res;
  const StepDistribution& sd = *cfg.step_distribution;
  std::int64_t radius = cfg.transverse_radius;
  if (radius < 0) {
    std::int64_t max_step = 0;
    for (const auto& a : sd.atoms)
      for (int i = 1; i < a.displacement.dim; ++i)
        max_step = std::max<std::int64_t>(max_step, std::abs(a.displacement[i]));
    radius = cfg.k_max * max_step;
  }
  res.table = hitting_probabilities(sd, cfg.k_max, radius);
  for (std::int64_t K = 1; K <= cfg.k_max; ++K) res.slab_masses.push_back(slab_mass(res.table, K));

  for (std::int64_t K = 1; K <= cfg.k_max; ++K) {
    Site axis = Site::zero(sd.dim());
    axis[0] = static_cast<std::int32_t>(K);
    const auto it = res.table.probabilities.find(axis);
    const double p = it == res.table.probabilities.end() ? 0.0 : it->second;
    res.axis_hit_scaled.push_back(static_cast<double>(K) * p);
  }
  std::vector<double> ks, ys;
  for (std::int64_t K = std::min<std::int64_t>(5, cfg.k_max); K <= cfg.k_max; ++K) {
    ks.push_back(static_cast<double>(K));
    ys.push_back(res.axis_hit_scaled[static_cast<std::size_t>(K - 1)]);
  }
  if (ks.size() >= 3) {
    res.trend = weighted_linear_fit(ks, ys, {});
    res.trend_valid = true;
  }
  return res;
}

// ---- selftest --------------------------------------------------------------

SelftestResult compute_selftest(const ExperimentConfig& cfg, int threads) {
  (void)threads;
  SelftestResult res;
  const auto check = [&](const std::string& name, bool pass, const std::string& detail = "") {
    res.checks.push_back({name, pass, detail});
    if (!pass) ++res.failures;
  };

  {
    const TransitionKernel uniform = TransitionKernel::uniform(2);
    check("ellipticity_uniform_kernel", validate_ellipticity(uniform, 0.1));
    TransitionKernel zero_entry = TransitionKernel::from(std::vector<double>{0.5, 0.5, 0.0, 0.0});
    check("ellipticity_zero_entry_rejected", !validate_ellipticity(zero_entry, 0.05));
    TransitionKernel short_sum = TransitionKernel::from(std::vector<double>{0.4, 0.3, 0.2, 0.099});
    check("ellipticity_bad_sum_rejected", !validate_ellipticity(short_sum, 0.05));
  }
  {
    const EnvDistribution pm = EnvDistribution::point_mass(TransitionKernel::uniform(2), 0.2);
    RngStream s(derive_key(cfg.master_seed, 1));
    check("point_mass_degenerate_draw", pm.sample(s) == TransitionKernel::uniform(2));
    const EnvDistribution pd =
        EnvDistribution::perturbed_drift(TransitionKernel::uniform(2), 0.0, 0.2);
    RngStream s2(derive_key(cfg.master_seed, 2));
    check("perturbed_drift_zero_epsilon", pd.sample(s2) == TransitionKernel::uniform(2));
  }
  {
    const EnvDistribution mix = EnvDistribution::finite_mixture(
        {{TransitionKernel::from(std::vector<double>{0.4, 0.1, 0.25, 0.25}), 0.5},
         {TransitionKernel::from(std::vector<double>{0.1, 0.4, 0.25, 0.25}), 0.5}},
        0.1);
    LazyEnvironment env(mix, 7);
    Site a = Site::zero(2);
    Site b = Site::zero(2);
    b[0] = 3;
    const TransitionKernel ka1 = env.kernel_at(a);
    const TransitionKernel kb = env.kernel_at(b);
    const TransitionKernel ka2 = env.kernel_at(a);
    check("memoized_lookup_identical", ka1 == ka2);
    LazyEnvironment env_again(mix, 7);
    const TransitionKernel kb2 = env_again.kernel_at(b);  // queried first this time
    const TransitionKernel ka3 = env_again.kernel_at(a);
    check("query_order_independence", ka1 == ka3 && kb == kb2);
  }
  {
    const EnvDistribution mix = EnvDistribution::finite_mixture(
        {{TransitionKernel::from(std::vector<double>{0.4, 0.1, 0.25, 0.25}), 0.5},
         {TransitionKernel::from(std::vector<double>{0.1, 0.4, 0.25, 0.25}), 0.5}},
        0.1);
    const WalkPath l1 = WalkPath::from_steps(Site::zero(2), {0, 0});
    Site s2 = Site::zero(2);
    s2[1] = 5;
    const WalkPath l2 = WalkPath::from_steps(s2, {2, 2});
    const CoupledTriple triple = make_coupled_triple(l1, l2, mix, TripleSeeds{1, 2, 3, 4});
    bool ok = true;
    for (const auto& s : l1.positions)
      if (triple.env1.kernel_at(s) != triple.env3.kernel_at(s)) ok = false;
    for (const auto& s : l2.positions)
      if (triple.env2.kernel_at(s) != triple.env3.kernel_at(s)) ok = false;
    check("coupling_agreement_on_lambdas", ok);
  }
  {
    // e1 coords 0,1,2,1,2,3 under margin 0: the paper's t^(1)=0 convention on
    // event D puts time 0 in, time 1 is the strict-record case, time 5 has no
    // future to certify.
    const WalkPath p = WalkPath::from_steps(Site::zero(2), {0, 0, 1, 0, 0});
    const RegenerationRecord rec =
        detect_regenerations(p, Direction::e1(), MarginPolicy{std::int64_t{0}});
    check("regeneration_hand_example",
          rec.confirmed_times == std::vector<std::int64_t>{0, 1} &&
              rec.censored_candidates == std::vector<std::int64_t>{5});
    const WalkPath mono = WalkPath::from_steps(Site::zero(2), std::vector<int>(8, 0));
    const RegenerationRecord rec2 =
        detect_regenerations(mono, Direction::e1(), MarginPolicy{std::int64_t{2}});
    check("regeneration_margin_censors_tail",
          rec2.confirmed_times == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5, 6} &&
              rec2.censored_candidates == std::vector<std::int64_t>{7, 8});
  }
  {
    const WalkPath p1 = WalkPath::from_steps(Site::zero(2), {0, 0, 0});
    Site o2 = Site::zero(2);
    o2[1] = 1;
    const WalkPath p2 = WalkPath::from_steps(o2, {0, 0, 0});
    check("disjoint_paths_no_intersection", intersection_points(p1, p2).empty());
    check("identical_paths_IN_diagonal", count_IN(p1, p1, 3) == 4);
    check("wk_strict_halfspace", !event_WK(p1, p1, 3).occurred && event_WK(p1, p1, 2).occurred);
  }
  {
    const WalkPath p = WalkPath::from_steps(Site::zero(2), std::vector<int>(4, 0));
    const ScaledPath sp = ScaledPath::build(p, 4, std::vector<double>{1.0, 0.0});
    bool all_zero = true;
    for (std::int64_t k = 0; k <= 4; ++k)
      for (int i = 0; i < 2; ++i)
        if (sp.knot(k, i) != 0.0) all_zero = false;
    check("ballistic_centering_cancels", all_zero);
    const ScaledPath raw = ScaledPath::build(p, 1, std::vector<double>{0.0, 0.0});
    check("dt_cap_at_one", d_T(raw, ScaledPath::build(WalkPath::from_steps(Site::zero(2), {1, 1, 1, 1}),
                                                      1, std::vector<double>{0.0, 0.0}),
                               4.0) == 1.0);
  }
  {
    std::vector<double> xs = {2.0, 4.0, 8.0, 16.0};
    std::vector<double> ps, ses;
    for (double x : xs) {
      ps.push_back(1.0 / (x * x));
      ses.push_back(0.01 / (x * x));
    }
    const TailFit fit = fit_tail_exponent(xs, ps, ses);
    check("tail_fit_exact_power_law", std::abs(fit.slope + 2.0) < 1e-9);
  }
  {
    StepDistribution sd = StepDistribution::make([] {
      std::vector<StepAtom> atoms;
      const std::vector<std::vector<std::int32_t>> steps = {
          {1, 0, 0}, {1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}};
      for (const auto& s : steps) {
        StepAtom a;
        a.displacement = Site::zero(3);
        for (int i = 0; i < 3; ++i) a.displacement[i] = s[static_cast<std::size_t>(i)];
        a.probability = 0.2;
        atoms.push_back(a);
      }
      return atoms;
    }());
    const HittingTable table = hitting_probabilities(sd, 10, 10);
    bool slabs_unit = true;
    for (std::int64_t K = 1; K <= 10; ++K)
      if (std::abs(slab_mass(table, K) - 1.0) > 1e-12) slabs_unit = false;
    check("unit_increment_slab_mass_one", slabs_unit);
    Site first = Site::zero(3);
    first[0] = 1;
    check("single_step_hit_probability", std::abs(table.probabilities.at(first) - 0.2) < 1e-15);
  }
  {
    const EnvDistribution pm = EnvDistribution::point_mass(
        TransitionKernel::from(std::vector<double>{0.4, 0.1, 0.25, 0.25}), 0.1);
    LazyEnvironment env(pm, 3);
    const EndpointLaw law = enumerate_quenched_law(env, Site::zero(2), 2);
    Site target = Site::zero(2);
    target[0] = 2;
    check("quenched_law_two_forward_steps", std::abs(law.at(target) - 0.16) < 1e-15);
    double total = 0.0;
    for (const auto& [site, prob] : law) total += prob;
    check("quenched_law_mass_one", std::abs(total - 1.0) < 1e-12);
  }
  return res;
}

}  // namespace rwre
