// Experiment drivers behind the CLI subcommands. Each compute_* function is a
// deterministic function of (config, threads): replica streams derive from
// (master_seed, experiment id, replica, role) and aggregation runs in replica
// order, so results do not depend on the thread count. The write_* companions
// emit the summary JSON and data tables; wall-clock metadata goes to a
// separate file so result files stay byte-comparable.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwre/config.hpp"
#include "rwre/estimators.hpp"
#include "rwre/intersection.hpp"
#include "rwre/oracle.hpp"
#include "rwre/regeneration.hpp"

namespace rwre {

std::uint64_t experiment_key(std::uint64_t master_seed, const std::string& name);

VectorEstimate pilot_speed(const EnvDistribution& dist, std::int64_t replicas,
                           std::int64_t horizon, std::uint64_t key, int threads);

// ---- simulate ----------------------------------------------------------
struct SimulateResult {
  VectorEstimate speed;
  std::vector<double> speed_used;  // centering v for the covariance
  bool speed_from_config = false;
  Matrix covariance;
  std::int64_t scale_n = 0;
  std::vector<WalkPath> dumped_paths;
};
SimulateResult compute_simulate(const ExperimentConfig& cfg, int threads);

// ---- regen --------------------------------------------------------------
struct DirectionStats {
  std::string name;                    // "e1" | "v"
  std::int64_t confirmed_total = 0;
  std::int64_t censored_total = 0;
  std::int64_t gap_count = 0;
  std::vector<MomentEstimate> moments;
  std::vector<double> gap_ratio;       // mean(dx)/mean(dt), componentwise
  std::vector<double> gap_ratio_se;
  std::vector<double> renewal_gap;     // |speed - ratio|
  std::vector<double> renewal_joint_se;
  bool renewal_pass = false;           // all components within 3 joint se
  double lag1_autocorr = 0.0;          // of the dt sequence
  bool stationarity_pass = false;      // |rho_1| < 4/sqrt(n)
};
struct RegenResult {
  VectorEstimate speed;
  std::vector<double> direction_v;     // the v used for direction-V detection
  std::vector<DirectionStats> directions;
  double d_rate = 0.0;                 // event-D acceptance rate
  double d_rate_se = 0.0;
  std::int64_t d_attempts = 0;
  std::int64_t sample_attempts_to_accept = 0;  // from one conditioned sample
  std::vector<RegenerationRecord> dumped_records;  // first few replicas, e1
};
RegenResult compute_regen(const ExperimentConfig& cfg, int threads);

// ---- intersect ----------------------------------------------------------
struct EventRateRow {
  std::int64_t R = 0;
  std::int64_t occurred = 0;
  std::int64_t not_occurred = 0;
  std::int64_t censored = 0;
  double rate = 0.0;  // occurred / decided
};
struct IntersectResult {
  std::int64_t horizon_used = 0;
  std::vector<double> pilot_speed_value;
  WKDecayResult wk;
  std::vector<EventRateRow> a_rates;
  std::vector<EventRateRow> b_rates;
  std::optional<EventRateRow> slab_rate;
  std::vector<std::int64_t> in_grid;
  std::vector<double> mean_IN;
};
IntersectResult compute_intersect(const ExperimentConfig& cfg, int threads);

// ---- clt ----------------------------------------------------------------
struct KsRow {
  std::int64_t env_index = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool degenerate = false;
  bool pass = false;
};
struct CltResult {
  std::vector<double> speed_used;
  bool speed_from_config = false;
  std::vector<std::int64_t> n_grid;
  std::vector<TwoLevelVariance> variances;
  std::int64_t ks_scale_n = 0;
  std::vector<KsRow> ks_rows;
  std::int64_t ks_passes = 0;
};
CltResult compute_clt(const ExperimentConfig& cfg, int threads);

// ---- series -------------------------------------------------------------
struct SeriesResult {
  std::vector<double> speed_used;
  bool speed_from_config = false;
  SeriesSummary summary;
  bool slope_valid = false;  // >= 2 positive summands
  LinearFit log_slope;       // ln(summand) vs m, weighted
};
SeriesResult compute_series(const ExperimentConfig& cfg, int threads);

// ---- oracle -------------------------------------------------------------
struct OracleQuenchedResult {
  Site start;
  std::int64_t horizon = 0;
  std::vector<std::pair<Site, double>> law;  // sorted by site
  double total_mass = 0.0;
  double tv_vs_monte_carlo = 0.0;
  std::int64_t mc_samples = 0;
};
OracleQuenchedResult compute_oracle_quenched(const ExperimentConfig& cfg, int threads);

struct CouplingTrialRow {
  std::int64_t trial = 0;
  std::int64_t T1 = 0, T2 = 0;
  bool lambdas_intersect = false;
  double residual = 0.0;
};
struct OracleCouplingResult {
  std::vector<CouplingTrialRow> trials;
  double max_residual = 0.0;
};
OracleCouplingResult compute_oracle_coupling(const ExperimentConfig& cfg, int threads);

struct OracleHittingResult {
  HittingTable table;
  std::vector<double> slab_masses;      // index K-1
  std::vector<double> axis_hit_scaled;  // K * P(hit K e1), K = 1..K_max
  LinearFit trend;                      // of K*P vs K over K in [5, K_max]
  bool trend_valid = false;
};
OracleHittingResult compute_oracle_hitting(const ExperimentConfig& cfg, int threads);

// ---- selftest -----------------------------------------------------------
struct SelftestResult {
  struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
  };
  std::vector<Check> checks;
  std::int64_t failures = 0;
};
SelftestResult compute_selftest(const ExperimentConfig& cfg, int threads);

// ---- output -------------------------------------------------------------
// Writes <name>_summary.json plus tables under out_dir; returns file list.
std::vector<std::string> write_simulate(const SimulateResult&, const ExperimentConfig&,
                                        const std::string& out_dir);
std::vector<std::string> write_regen(const RegenResult&, const ExperimentConfig&,
                                     const std::string& out_dir);
std::vector<std::string> write_intersect(const IntersectResult&, const ExperimentConfig&,
                                         const std::string& out_dir);
std::vector<std::string> write_clt(const CltResult&, const ExperimentConfig&,
                                   const std::string& out_dir);
std::vector<std::string> write_series(const SeriesResult&, const ExperimentConfig&,
                                      const std::string& out_dir);
std::vector<std::string> write_oracle_quenched(const OracleQuenchedResult&,
                                               const ExperimentConfig&,
                                               const std::string& out_dir);
std::vector<std::string> write_oracle_coupling(const OracleCouplingResult&,
                                               const ExperimentConfig&,
                                               const std::string& out_dir);
std::vector<std::string> write_oracle_hitting(const OracleHittingResult&,
                                              const ExperimentConfig&,
                                              const std::string& out_dir);
std::vector<std::string> write_selftest(const SelftestResult&, const ExperimentConfig&,
                                        const std::string& out_dir);

void write_meta(const std::string& out_dir, const std::string& name, double elapsed_seconds,
                int threads);

}  // namespace rwre
