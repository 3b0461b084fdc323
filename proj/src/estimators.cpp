#include "rwre/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/environment.hpp"
#include "rwre/parallel.hpp"
#include "rwre/walk.hpp"

namespace rwre {

VectorEstimate estimate_speed(const std::vector<std::pair<Site, std::int64_t>>& endpoints) {
  if (endpoints.size() < 2) throw std::invalid_argument("estimate_speed: need >= 2 samples");
  const int d = endpoints.front().first.dim;
  const std::size_t n = endpoints.size();
  VectorEstimate est;
  est.samples = static_cast<std::int64_t>(n);
  est.value.assign(static_cast<std::size_t>(d), 0.0);
  est.stderr_.assign(static_cast<std::size_t>(d), 0.0);
  for (const auto& [site, horizon] : endpoints) {
    if (horizon < 1) throw std::invalid_argument("estimate_speed: horizon must be >= 1");
    for (int i = 0; i < d; ++i)
      est.value[static_cast<std::size_t>(i)] +=
          static_cast<double>(site[i]) / static_cast<double>(horizon);
  }
  for (int i = 0; i < d; ++i) est.value[static_cast<std::size_t>(i)] /= static_cast<double>(n);
  for (const auto& [site, horizon] : endpoints) {
    for (int i = 0; i < d; ++i) {
      const double dev = static_cast<double>(site[i]) / static_cast<double>(horizon) -
                         est.value[static_cast<std::size_t>(i)];
      est.stderr_[static_cast<std::size_t>(i)] += dev * dev;
    }
  }
  for (int i = 0; i < d; ++i)
    est.stderr_[static_cast<std::size_t>(i)] = std::sqrt(
        est.stderr_[static_cast<std::size_t>(i)] / (static_cast<double>(n - 1) * static_cast<double>(n)));
  return est;
}

std::vector<double> scaled_endpoint(const Site& x_at_n, std::int64_t n,
                                    std::span<const double> v) {
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> out(static_cast<std::size_t>(x_at_n.dim));
  for (int i = 0; i < x_at_n.dim; ++i)
    out[static_cast<std::size_t>(i)] =
        (static_cast<double>(x_at_n[i]) -
         std::floor(v[static_cast<std::size_t>(i)] * static_cast<double>(n))) *
        inv_sqrt_n;
  return out;
}

Matrix sample_covariance(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("sample_covariance: need >= 2 replicas");
  const int d = static_cast<int>(rows.front().size());
  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  for (const auto& r : rows)
    for (int i = 0; i < d; ++i) mean[static_cast<std::size_t>(i)] += r[static_cast<std::size_t>(i)];
  for (double& m : mean) m /= static_cast<double>(rows.size());
  Matrix cov(d);
  for (const auto& r : rows)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        cov.at(i, j) += (r[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)]) *
                        (r[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]);
  const double denom = static_cast<double>(rows.size()) - 1.0;
  for (double& x : cov.a) x /= denom;
  return cov;
}

Matrix estimate_annealed_covariance(const std::vector<WalkPath>& paths, std::int64_t n,
                                    std::span<const double> v) {
  std::vector<std::vector<double>> rows;
  rows.reserve(paths.size());
  for (const auto& p : paths) {
    if (p.horizon() < n)
      throw std::invalid_argument("estimate_annealed_covariance: path shorter than n");
    rows.push_back(scaled_endpoint(p.at(n), n, v));
  }
  return sample_covariance(rows);
}

namespace {

struct GroupSums {
  double s = 0.0;   // sum of values
  double q = 0.0;   // sum of squares
};

// One-way ANOVA variance components from per-group sums.
TwoLevelVariance anova_from_sums(const std::vector<GroupSums>& groups, std::int64_t W) {
  const std::int64_t E = static_cast<std::int64_t>(groups.size());
  double grand = 0.0;
  for (const auto& g : groups) grand += g.s;
  const double n_total = static_cast<double>(E * W);
  const double grand_mean = grand / n_total;

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    const double gm = g.s / static_cast<double>(W);
    ss_between += (gm - grand_mean) * (gm - grand_mean);
    ss_within += g.q - g.s * g.s / static_cast<double>(W);
  }
  TwoLevelVariance out;
  out.n_env = E;
  out.n_walks_per_env = W;
  out.between_mean_square =
      static_cast<double>(W) * ss_between / static_cast<double>(E - 1);
  out.within_mean_square = ss_within / (static_cast<double>(E) * static_cast<double>(W - 1));
  out.raw_estimate = (out.between_mean_square - out.within_mean_square) / static_cast<double>(W);
  out.clamped = out.raw_estimate < 0.0;
  out.estimate = std::max(0.0, out.raw_estimate);
  return out;
}

double anova_raw_without(const std::vector<GroupSums>& groups, std::int64_t W,
                         std::size_t skip) {
  const std::int64_t E = static_cast<std::int64_t>(groups.size()) - 1;
  double grand = 0.0;
  for (std::size_t e = 0; e < groups.size(); ++e)
    if (e != skip) grand += groups[e].s;
  const double n_total = static_cast<double>(E * W);
  const double grand_mean = grand / n_total;
  double ss_between = 0.0, ss_within = 0.0;
  for (std::size_t e = 0; e < groups.size(); ++e) {
    if (e == skip) continue;
    const double gm = groups[e].s / static_cast<double>(W);
    ss_between += (gm - grand_mean) * (gm - grand_mean);
    ss_within += groups[e].q - groups[e].s * groups[e].s / static_cast<double>(W);
  }
  const double msb = static_cast<double>(W) * ss_between / static_cast<double>(E - 1);
  const double msw = ss_within / (static_cast<double>(E) * static_cast<double>(W - 1));
  return (msb - msw) / static_cast<double>(W);
}

TwoLevelVariance anova_with_jackknife(const std::vector<GroupSums>& groups, std::int64_t W) {
  TwoLevelVariance out = anova_from_sums(groups, W);
  const std::size_t E = groups.size();
  if (E >= 3) {
    std::vector<double> loo(E);
    double loo_mean = 0.0;
    for (std::size_t e = 0; e < E; ++e) {
      loo[e] = anova_raw_without(groups, W, e);
      loo_mean += loo[e];
    }
    loo_mean /= static_cast<double>(E);
    double ss = 0.0;
    for (double x : loo) ss += (x - loo_mean) * (x - loo_mean);
    out.stderr_ = std::sqrt(ss * static_cast<double>(E - 1) / static_cast<double>(E));
  }
  return out;
}

}  // namespace

TwoLevelVariance two_level_variance(const std::vector<std::vector<double>>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("two_level_variance: need >= 2 groups");
  const std::size_t W = samples.front().size();
  if (W < 2) throw std::invalid_argument("two_level_variance: need >= 2 values per group");
  std::vector<GroupSums> groups(samples.size());
  for (std::size_t e = 0; e < samples.size(); ++e) {
    if (samples[e].size() != W)
      throw std::invalid_argument("two_level_variance: ragged sample matrix");
    for (double y : samples[e]) {
      groups[e].s += y;
      groups[e].q += y * y;
    }
  }
  return anova_with_jackknife(groups, static_cast<std::int64_t>(W));
}

TwoLevelVariance quenched_mean_variance(const EnvDistribution& dist, const FunctionalSpec& spec,
                                        std::int64_t N, std::int64_t n_env,
                                        std::int64_t n_walks_per_env, std::span<const double> v,
                                        std::uint64_t seed, int threads) {
  if (n_env < 2) throw std::invalid_argument("quenched_mean_variance: n_env must be >= 2");
  if (n_walks_per_env < 2)
    throw std::invalid_argument(
        "quenched_mean_variance: n_walks_per_env must be >= 2 (within-group variance)");
  if (N < 1) throw std::invalid_argument("quenched_mean_variance: N must be >= 1");

  const std::int64_t horizon =
      static_cast<std::int64_t>(std::ceil(static_cast<double>(N) * spec.T));
  const Site origin = Site::zero(dist.dim());
  std::vector<GroupSums> groups(static_cast<std::size_t>(n_env));

  parallel_replicas(n_env, threads, [&](std::int64_t e) {
    LazyEnvironment env(dist, derive_key(seed, StreamRole::Environment, e));
    WalkPath path;
    GroupSums g;
    for (std::int64_t w = 0; w < n_walks_per_env; ++w) {
      simulate_path_into(env, origin, horizon, derive_key(seed, StreamRole::Walk1, e, w), path);
      const ScaledPath sp = ScaledPath::build(path, N, v);
      const double y = evaluate_functional(spec, sp);
      g.s += y;
      g.q += y * y;
    }
    groups[static_cast<std::size_t>(e)] = g;
  });

  return anova_with_jackknife(groups, n_walks_per_env);
}

std::uint64_t series_summand_seed(std::uint64_t seed, std::int64_t m) {
  return derive_key(seed, StreamRole::Pilot, m);
}

SeriesSummary bs_series_summands(const EnvDistribution& dist, const FunctionalSpec& spec, double b,
                                 std::int64_t m_lo, std::int64_t m_hi, std::int64_t n_env,
                                 std::int64_t n_walks_per_env, std::span<const double> v,
                                 std::uint64_t seed, int threads) {
  if (!(b > 1.0) || b > 2.0)
    throw std::invalid_argument("bs_series_summands: b must lie in (1, 2]");
  if (m_lo > m_hi) throw std::invalid_argument("bs_series_summands: empty m range");
  SeriesSummary summary;
  summary.b = b;
  double running = 0.0;
  for (std::int64_t m = m_lo; m <= m_hi; ++m) {
    const std::int64_t N =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::pow(b, static_cast<double>(m)))));
    SeriesSummand s;
    s.m = m;
    s.N = N;
    s.variance = quenched_mean_variance(dist, spec, N, n_env, n_walks_per_env, v,
                                        series_summand_seed(seed, m), threads);
    running += s.variance.raw_estimate;
    summary.summands.push_back(std::move(s));
    summary.partial_sums.push_back(running);
  }
  return summary;
}

LinearFit weighted_linear_fit(std::span<const double> xs, std::span<const double> ys,
                              std::span<const double> sigmas) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("weighted_linear_fit: need >= 2 points");
  const bool weighted = !sigmas.empty();
  if (weighted && sigmas.size() != xs.size())
    throw std::invalid_argument("weighted_linear_fit: sigma size mismatch");

  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double w = weighted ? 1.0 / (sigmas[i] * sigmas[i]) : 1.0;
    sw += w;
    swx += w * xs[i];
    swy += w * ys[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double w = weighted ? 1.0 / (sigmas[i] * sigmas[i]) : 1.0;
    sxx += w * (xs[i] - xbar) * (xs[i] - xbar);
    sxy += w * (xs[i] - xbar) * (ys[i] - ybar);
    syy += w * (ys[i] - ybar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("weighted_linear_fit: degenerate abscissae");

  LinearFit fit;
  fit.points = static_cast<std::int64_t>(xs.size());
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double w = weighted ? 1.0 / (sigmas[i] * sigmas[i]) : 1.0;
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += w * r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (weighted) {
    // Measurement errors known: the slope variance is 1/Sxx.
    fit.slope_stderr = std::sqrt(1.0 / sxx);
  } else {
    const std::size_t n = xs.size();
    fit.slope_stderr =
        n > 2 ? std::sqrt(ss_res / (static_cast<double>(n - 2) * sxx)) : 0.0;
  }
  return fit;
}

TailFit fit_tail_exponent(std::span<const double> xs, std::span<const double> ps,
                          std::span<const double> ses) {
  if (xs.size() != ps.size() || xs.size() != ses.size())
    throw std::invalid_argument("fit_tail_exponent: size mismatch");
  TailFit out;
  std::vector<double> lx, lp, ls;
  bool all_se_positive = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ps[i] > 0.0)) {
      out.excluded_points.push_back(static_cast<std::int64_t>(i));
      continue;
    }
    lx.push_back(std::log(xs[i]));
    lp.push_back(std::log(ps[i]));
    ls.push_back(ses[i] / ps[i]);  // delta method for log p
    if (!(ses[i] > 0.0)) all_se_positive = false;
  }
  if (lx.size() < 2)
    throw std::invalid_argument("fit_tail_exponent: fewer than 2 strictly positive points");
  const LinearFit fit =
      weighted_linear_fit(lx, lp, all_se_positive ? std::span<const double>(ls) : std::span<const double>());
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.slope_stderr = fit.slope_stderr;
  out.r_squared = fit.r_squared;
  out.points_used = fit.points;
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097); }

KsResult ks_normality_check(std::span<const double> samples) {
  if (samples.size() < 20) throw std::invalid_argument("ks_normality_check: need >= 20 samples");
  KsResult out;
  out.n = static_cast<std::int64_t>(samples.size());
  out.threshold = 1.36 / std::sqrt(static_cast<double>(samples.size()));
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size() - 1);
  if (!(var > 0.0)) {
    out.degenerate = true;
    return out;
  }
  const double sd = std::sqrt(var);
  std::vector<double> z(samples.begin(), samples.end());
  for (double& x : z) x = (x - mean) / sd;
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = normal_cdf(z[i]);
    dmax = std::max(dmax, std::max((static_cast<double>(i) + 1.0) / n - cdf,
                                   cdf - static_cast<double>(i) / n));
  }
  out.statistic = dmax;
  return out;
}

}  // namespace rwre
