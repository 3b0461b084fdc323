// Statistical estimators over replica output: LLN speed, annealed covariance
// of the scaled endpoint, the two-level (between-environment) variance of
// quenched means, the geometric-scale series summands behind the
// Bolthausen-Sznitman criterion, weighted log-log tail fits, and a KS
// normality diagnostic. Estimators are pure folds in replica order.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rwre/env_dist.hpp"
#include "rwre/estimators_types.hpp"
#include "rwre/path.hpp"
#include "rwre/scaled_path.hpp"

namespace rwre {

struct VectorEstimate {
  std::vector<double> value;
  std::vector<double> stderr_;
  std::int64_t samples = 0;
};

// Componentwise mean of X(horizon)/horizon with standard errors.
VectorEstimate estimate_speed(const std::vector<std::pair<Site, std::int64_t>>& endpoints);

struct Matrix {
  int d = 0;
  std::vector<double> a;
  explicit Matrix(int dim = 0) : d(dim), a(static_cast<std::size_t>(dim * dim), 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i * d + j)]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i * d + j)]; }
};

// (X(n) - floor(n v)) / sqrt(n), the scaled endpoint B^n(1).
std::vector<double> scaled_endpoint(const Site& x_at_n, std::int64_t n, std::span<const double> v);

// Unbiased sample covariance of the rows.
Matrix sample_covariance(const std::vector<std::vector<double>>& rows);

// Sample covariance of B^n(1) across replica paths.
Matrix estimate_annealed_covariance(const std::vector<WalkPath>& paths, std::int64_t n,
                                    std::span<const double> v);

struct TwoLevelVariance {
  double estimate = 0.0;        // clamped at 0
  double raw_estimate = 0.0;    // unclamped ANOVA value
  double stderr_ = 0.0;         // delete-one-environment jackknife
  bool clamped = false;
  double between_mean_square = 0.0;
  double within_mean_square = 0.0;
  std::int64_t n_env = 0;
  std::int64_t n_walks_per_env = 0;
};

// Var_P(E_omega F(beta^N)) via the one-way ANOVA decomposition: n_env
// environments, n_walks_per_env walks each, F evaluated on the scaled path at
// scale N with centering speed v.
TwoLevelVariance quenched_mean_variance(const EnvDistribution& dist, const FunctionalSpec& spec,
                                        std::int64_t N, std::int64_t n_env,
                                        std::int64_t n_walks_per_env, std::span<const double> v,
                                        std::uint64_t seed, int threads);

// The same decomposition applied to an externally produced sample matrix
// (row = environment); used by tests against analytic hierarchical models.
TwoLevelVariance two_level_variance(const std::vector<std::vector<double>>& samples);

struct SeriesSummand {
  std::int64_t m = 0;
  std::int64_t N = 0;  // floor(b^m)
  TwoLevelVariance variance;
};

struct SeriesSummary {
  double b = 0.0;
  std::vector<SeriesSummand> summands;
  std::vector<double> partial_sums;  // running sums of the raw estimates
};

SeriesSummary bs_series_summands(const EnvDistribution& dist, const FunctionalSpec& spec, double b,
                                 std::int64_t m_lo, std::int64_t m_hi, std::int64_t n_env,
                                 std::int64_t n_walks_per_env, std::span<const double> v,
                                 std::uint64_t seed, int threads);

// Derived seed for the summand at index m; exposed so callers can reproduce a
// single summand through quenched_mean_variance.
std::uint64_t series_summand_seed(std::uint64_t seed, std::int64_t m);

// Weighted least squares on (log x, log p), weights from delta-method errors
// se/p. Non-positive entries are excluded and recorded. With any non-positive
// standard error the fit falls back to unweighted.
TailFit fit_tail_exponent(std::span<const double> xs, std::span<const double> ps,
                          std::span<const double> ses);

// Plain weighted linear fit y ~ a + b x (unit weights when sigmas empty).
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  std::int64_t points = 0;
};
LinearFit weighted_linear_fit(std::span<const double> xs, std::span<const double> ys,
                              std::span<const double> sigmas);

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;  // 1.36 / sqrt(n), asymptotic 5% level
  bool degenerate = false;
  std::int64_t n = 0;
};

// KS distance between the standardized sample and the standard normal CDF.
KsResult ks_normality_check(std::span<const double> samples);

double normal_cdf(double x);

}  // namespace rwre
