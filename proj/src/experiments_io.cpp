#include <chrono>
#include <algorithm>
#include <filesystem>
#include <fstream>

#include "rwre/errors.hpp"
#include "rwre/experiments.hpp"
#include "rwre/io.hpp"

namespace rwre {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const std::string& out_dir, const std::string& name,
                       std::vector<std::string>& files, bool binary = false) {
  fs::create_directories(out_dir);
  const fs::path p = fs::path(out_dir) / name;
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw config_error("cannot open output file " + p.string());
  files.push_back(p.string());
  return os;
}

void write_kernel(JsonWriter& w, const TransitionKernel& k) {
  w.begin_array();
  for (int i = 0; i < k.directions(); ++i) w.value(k.prob(i));
  w.end_array();
}

// Full round-trippable environment echo in the config schema.
void write_environment(JsonWriter& w, const EnvDistribution& env) {
  w.begin_object();
  w.key("family");
  switch (env.family()) {
    case EnvDistribution::Family::PointMass: w.value("point_mass"); break;
    case EnvDistribution::Family::FiniteMixture: w.value("finite_mixture"); break;
    case EnvDistribution::Family::PerturbedDrift: w.value("perturbed_drift"); break;
  }
  w.kv("kappa", env.kappa());
  switch (env.family()) {
    case EnvDistribution::Family::PointMass:
      w.key("kernel");
      write_kernel(w, env.support().front().kernel);
      break;
    case EnvDistribution::Family::FiniteMixture:
      w.key("components");
      w.begin_array();
      for (const auto& c : env.support()) {
        w.begin_object();
        w.key("kernel");
        write_kernel(w, c.kernel);
        w.kv("weight", c.weight);
        w.end_object();
      }
      w.end_array();
      break;
    case EnvDistribution::Family::PerturbedDrift:
      w.key("base_kernel");
      write_kernel(w, env.base_kernel());
      w.kv("epsilon", env.epsilon());
      break;
  }
  w.end_object();
}

void write_config_echo(JsonWriter& w, const ExperimentConfig& cfg) {
  w.key("config");
  w.begin_object();
  w.kv("dimension", cfg.dimension);
  w.kv("master_seed", cfg.master_seed);
  w.kv("replicas", cfg.replicas);
  w.kv("horizon", cfg.horizon);
  w.key("environment");
  write_environment(w, cfg.environment);
  w.end_object();
}

void write_vector(JsonWriter& w, const std::string& key, std::span<const double> v) {
  w.key(key);
  w.begin_array();
  for (double x : v) w.value(x);
  w.end_array();
}

// The estimator-record rows every summary carries: (estimator, value, stderr, n).
struct Record {
  std::string estimator;
  double value;
  double stderr_;
  std::int64_t n;
};

void write_records(JsonWriter& w, const std::vector<Record>& records) {
  w.key("records");
  w.begin_array();
  for (const auto& r : records) {
    w.begin_object();
    w.kv("estimator", r.estimator);
    w.kv("value", r.value);
    w.kv("stderr", r.stderr_);
    w.kv("n", r.n);
    w.end_object();
  }
  w.end_array();
}

}  // namespace

std::vector<std::string> write_simulate(const SimulateResult& res, const ExperimentConfig& cfg,
                                        const std::string& out_dir) {
  std::vector<std::string> files;
  {
    auto os = open_out(out_dir, "simulate_summary.json", files);
    JsonWriter w(os);
    w.begin_object();
    w.kv("experiment", "simulate");
    write_config_echo(w, cfg);
    write_vector(w, "speed", res.speed.value);
    write_vector(w, "speed_stderr", res.speed.stderr_);
    write_vector(w, "speed_used_for_centering", res.speed_used);
    w.kv("speed_from_config", res.speed_from_config);
    w.kv("scale_n", res.scale_n);
    w.key("covariance");
    w.begin_array();
    for (int i = 0; i < res.covariance.d; ++i) {
      w.begin_array();
      for (int j = 0; j < res.covariance.d; ++j) w.value(res.covariance.at(i, j));
      w.end_array();
    }
    w.end_array();
    std::vector<Record> records;
    for (int i = 0; i < res.covariance.d; ++i)
      records.push_back({"speed_" + std::to_string(i + 1), res.speed.value[static_cast<std::size_t>(i)],
                         res.speed.stderr_[static_cast<std::size_t>(i)], res.speed.samples});
    write_records(w, records);
    w.end_object();
  }
  if (cfg.path_dump.format == "tsv" && !res.dumped_paths.empty()) {
    auto os = open_out(out_dir, "paths.tsv", files);
    write_paths_tsv(os, res.dumped_paths);
  } else if (cfg.path_dump.format == "binary" && !res.dumped_paths.empty()) {
    auto os = open_out(out_dir, "paths.bin", files, true);
    write_paths_binary(os, res.dumped_paths);
  }
  return files;
}

std::vector<std::string> write_regen(const RegenResult& res, const ExperimentConfig& cfg,
                                     const std::string& out_dir) {
  std::vector<std::string> files;
  {
    auto os = open_out(out_dir, "regen_summary.json", files);
    JsonWriter w(os);
    w.begin_object();
    w.kv("experiment", "regen");
    write_config_echo(w, cfg);
    write_vector(w, "speed", res.speed.value);
    write_vector(w, "speed_stderr", res.speed.stderr_);
    write_vector(w, "direction_v", res.direction_v);
    w.key("directions");
    w.begin_array();
    for (const auto& st : res.directions) {
      w.begin_object();
      w.kv("direction", st.name);
      w.kv("confirmed_total", st.confirmed_total);
      w.kv("censored_total", st.censored_total);
      w.kv("gap_count", st.gap_count);
      w.key("moments");
      w.begin_array();
      for (const auto& m : st.moments) {
        w.begin_object();
        w.kv("order", m.order);
        w.kv("estimate", m.point_estimate);
        w.kv("stderr", m.standard_error);
        w.kv("n", m.sample_size);
        w.end_object();
      }
      w.end_array();
      write_vector(w, "gap_ratio", st.gap_ratio);
      write_vector(w, "gap_ratio_stderr", st.gap_ratio_se);
      write_vector(w, "renewal_gap", st.renewal_gap);
      write_vector(w, "renewal_joint_stderr", st.renewal_joint_se);
      w.kv("renewal_pass", st.renewal_pass);
      w.kv("lag1_autocorrelation", st.lag1_autocorr);
      w.kv("stationarity_pass", st.stationarity_pass);
      w.end_object();
    }
    w.end_array();
    w.kv("event_D_rate", res.d_rate);
    w.kv("event_D_rate_stderr", res.d_rate_se);
    w.kv("event_D_attempts", res.d_attempts);
    w.kv("conditioned_sample_attempts", res.sample_attempts_to_accept);
    std::vector<Record> records = {{"event_D_rate", res.d_rate, res.d_rate_se, res.d_attempts}};
    for (const auto& st : res.directions)
      for (const auto& m : st.moments)
        records.push_back({"gap_moment_r" + format_double(m.order) + "_" + st.name,
                           m.point_estimate, m.standard_error, m.sample_size});
    write_records(w, records);
    w.end_object();
  }
  {
    auto os = open_out(out_dir, "regen_records.tsv", files);
    TableWriter table(os, {"replica", "direction", "time", "status"});
    for (std::size_t r = 0; r < res.dumped_records.size(); ++r) {
      const auto& rec = res.dumped_records[r];
      for (std::int64_t t : rec.confirmed_times) {
        table.cell(static_cast<std::int64_t>(r)).cell(std::string("e1")).cell(t).cell(
            std::string("confirmed"));
        table.end_row();
      }
      for (std::int64_t t : rec.censored_candidates) {
        table.cell(static_cast<std::int64_t>(r)).cell(std::string("e1")).cell(t).cell(
            std::string("censored"));
        table.end_row();
      }
    }
  }
  return files;
}

std::vector<std::string> write_intersect(const IntersectResult& res, const ExperimentConfig& cfg,
                                         const std::string& out_dir) {
  std::vector<std::string> files;
  {
    auto os = open_out(out_dir, "intersect_summary.json", files);
    JsonWriter w(os);
    w.begin_object();
    w.kv("experiment", "intersect");
    write_config_echo(w, cfg);
    w.kv("horizon_used", res.horizon_used);
    write_vector(w, "pilot_speed", res.pilot_speed_value);
    w.key("wk_fit");
    w.begin_object();
    w.kv("slope", res.wk.fit.slope);
    w.kv("slope_stderr", res.wk.fit.slope_stderr);
    w.kv("intercept", res.wk.fit.intercept);
    w.kv("r_squared", res.wk.fit.r_squared);
    w.kv("points_used", res.wk.fit.points_used);
    w.kv("degenerate", res.wk.degenerate);
    w.end_object();
    w.key("in_grid");
    w.begin_array();
    for (std::int64_t n : res.in_grid) w.value(n);
    w.end_array();
    write_vector(w, "mean_IN", res.mean_IN);
    const auto rate_rows = [&](const std::string& key, const std::vector<EventRateRow>& rows) {
      w.key(key);
      w.begin_array();
      for (const auto& r : rows) {
        w.begin_object();
        w.kv("R", r.R);
        w.kv("occurred", r.occurred);
        w.kv("not_occurred", r.not_occurred);
        w.kv("censored", r.censored);
        w.kv("rate", r.rate);
        w.end_object();
      }
      w.end_array();
    };
    rate_rows("a_rates", res.a_rates);
    rate_rows("b_rates", res.b_rates);
    if (res.slab_rate) {
      w.key("slab_rate");
      w.begin_object();
      w.kv("k", res.slab_rate->R);
      w.kv("occurred", res.slab_rate->occurred);
      w.kv("not_occurred", res.slab_rate->not_occurred);
      w.kv("censored", res.slab_rate->censored);
      w.kv("rate", res.slab_rate->rate);
      w.end_object();
    }
    std::vector<Record> records;
    for (const auto& row : res.wk.rows)
      records.push_back({"wk_p_hat_K" + std::to_string(row.K), row.p_hat, row.stderr_p,
                         row.replicas});
    records.push_back({"wk_slope", res.wk.fit.slope, res.wk.fit.slope_stderr,
                       res.wk.fit.points_used});
    write_records(w, records);
    w.end_object();
  }
  {
    auto os = open_out(out_dir, "wk_decay.tsv", files);
    TableWriter table(os, {"K", "successes", "replicas", "p_hat", "stderr", "short_runs",
                           "excluded"});
    for (const auto& row : res.wk.rows) {
      table.cell(row.K)
          .cell(row.successes)
          .cell(row.replicas)
          .cell(row.p_hat)
          .cell(row.stderr_p)
          .cell(row.short_runs)
          .cell(static_cast<std::int64_t>(row.excluded));
      table.end_row();
    }
  }
  return files;
}

std::vector<std::string> write_clt(const CltResult& res, const ExperimentConfig& cfg,
                                   const std::string& out_dir) {
  std::vector<std::string> files;
  auto os = open_out(out_dir, "clt_summary.json", files);
  JsonWriter w(os);
  w.begin_object();
  w.kv("experiment", "clt");
  write_config_echo(w, cfg);
  write_vector(w, "speed_used_for_centering", res.speed_used);
  w.kv("speed_from_config", res.speed_from_config);
  w.kv("functional", cfg.functional.kind_name());
  w.key("quenched_mean_variance");
  w.begin_array();
  for (std::size_t i = 0; i < res.n_grid.size(); ++i) {
    const auto& v = res.variances[i];
    w.begin_object();
    w.kv("N", res.n_grid[i]);
    w.kv("estimate", v.estimate);
    w.kv("raw_estimate", v.raw_estimate);
    w.kv("stderr", v.stderr_);
    w.kv("clamped", v.clamped);
    w.kv("between_mean_square", v.between_mean_square);
    w.kv("within_mean_square", v.within_mean_square);
    w.kv("n_env", v.n_env);
    w.kv("walks_per_env", v.n_walks_per_env);
    w.end_object();
  }
  w.end_array();
  w.kv("ks_scale_n", res.ks_scale_n);
  w.key("ks_rows");
  w.begin_array();
  for (const auto& row : res.ks_rows) {
    w.begin_object();
    w.kv("env_index", row.env_index);
    w.kv("statistic", row.statistic);
    w.kv("threshold", row.threshold);
    w.kv("degenerate", row.degenerate);
    w.kv("pass", row.pass);
    w.end_object();
  }
  w.end_array();
  w.kv("ks_passes", res.ks_passes);
  std::vector<Record> records;
  for (std::size_t i = 0; i < res.n_grid.size(); ++i)
    records.push_back({"quenched_variance_N" + std::to_string(res.n_grid[i]),
                       res.variances[i].estimate, res.variances[i].stderr_,
                       res.variances[i].n_env});
  write_records(w, records);
  w.end_object();
  return files;
}

std::vector<std::string> write_series(const SeriesResult& res, const ExperimentConfig& cfg,
                                      const std::string& out_dir) {
  std::vector<std::string> files;
  {
    auto os = open_out(out_dir, "series_summary.json", files);
    JsonWriter w(os);
    w.begin_object();
    w.kv("experiment", "series");
    write_config_echo(w, cfg);
    write_vector(w, "speed_used_for_centering", res.speed_used);
    w.kv("b", res.summary.b);
    w.kv("functional", cfg.functional.kind_name());
    w.kv("slope_valid", res.slope_valid);
    w.key("log_summand_fit");
    w.begin_object();
    w.kv("slope", res.log_slope.slope);
    w.kv("slope_stderr", res.log_slope.slope_stderr);
    w.kv("intercept", res.log_slope.intercept);
    w.kv("points", res.log_slope.points);
    w.end_object();
    std::vector<Record> records;
    for (const auto& s : res.summary.summands)
      records.push_back({"bs_summand_m" + std::to_string(s.m), s.variance.raw_estimate,
                         s.variance.stderr_, s.variance.n_env});
    write_records(w, records);
    w.end_object();
  }
  {
    auto os = open_out(out_dir, "series_summands.tsv", files);
    TableWriter table(os, {"m", "N", "estimate", "raw_estimate", "stderr", "clamped",
                           "partial_sum"});
    for (std::size_t i = 0; i < res.summary.summands.size(); ++i) {
      const auto& s = res.summary.summands[i];
      table.cell(s.m)
          .cell(s.N)
          .cell(s.variance.estimate)
          .cell(s.variance.raw_estimate)
          .cell(s.variance.stderr_)
          .cell(static_cast<std::int64_t>(s.variance.clamped))
          .cell(res.summary.partial_sums[i]);
      table.end_row();
    }
  }
  return files;
}

std::vector<std::string> write_oracle_quenched(const OracleQuenchedResult& res,
                                               const ExperimentConfig& cfg,
                                               const std::string& out_dir) {
  std::vector<std::string> files;
  {
    auto os = open_out(out_dir, "oracle_quenched_summary.json", files);
    JsonWriter w(os);
    w.begin_object();
    w.kv("experiment", "oracle-quenched");
    write_config_echo(w, cfg);
    w.kv("horizon", res.horizon);
    w.kv("support_size", static_cast<std::int64_t>(res.law.size()));
    w.kv("total_mass", res.total_mass);
    w.kv("tv_vs_monte_carlo", res.tv_vs_monte_carlo);
    w.kv("mc_samples", res.mc_samples);
    w.end_object();
  }
  {
    auto os = open_out(out_dir, "oracle_quenched_law.tsv", files);
    std::vector<std::string> cols;
    for (int i = 0; i < res.start.dim; ++i) cols.push_back("x" + std::to_string(i + 1));
    cols.push_back("probability");
    TableWriter table(os, cols);
    for (const auto& [site, prob] : res.law) {
      for (int i = 0; i < site.dim; ++i) table.cell(static_cast<std::int64_t>(site[i]));
      table.cell(prob);
      table.end_row();
    }
  }
  return files;
}

std::vector<std::string> write_oracle_coupling(const OracleCouplingResult& res,
                                               const ExperimentConfig& cfg,
                                               const std::string& out_dir) {
  std::vector<std::string> files;
  auto os = open_out(out_dir, "oracle_coupling_summary.json", files);
  JsonWriter w(os);
  w.begin_object();
  w.kv("experiment", "oracle-coupling");
  write_config_echo(w, cfg);
  w.kv("trials", static_cast<std::int64_t>(res.trials.size()));
  w.kv("max_residual", res.max_residual);
  w.kv("identity_holds_at_1e-12", res.max_residual < 1e-12);
  w.key("trial_rows");
  w.begin_array();
  for (const auto& t : res.trials) {
    w.begin_object();
    w.kv("trial", t.trial);
    w.kv("T1", t.T1);
    w.kv("T2", t.T2);
    w.kv("lambdas_intersect", t.lambdas_intersect);
    w.kv("residual", t.residual);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return files;
}

std::vector<std::string> write_oracle_hitting(const OracleHittingResult& res,
                                              const ExperimentConfig& cfg,
                                              const std::string& out_dir) {
  std::vector<std::string> files;
  {
    auto os = open_out(out_dir, "oracle_hitting_summary.json", files);
    JsonWriter w(os);
    w.begin_object();
    w.kv("experiment", "oracle-hitting");
    write_config_echo(w, cfg);
    w.kv("k_max", res.table.K_max);
    w.kv("leaked_mass", res.table.leaked_mass);
    w.kv("max_conservation_error", res.table.max_conservation_error);
    double max_slab = 0.0;
    for (double m : res.slab_masses) max_slab = std::max(max_slab, m);
    w.kv("max_slab_mass", max_slab);
    write_vector(w, "slab_masses", res.slab_masses);
    write_vector(w, "axis_hit_scaled", res.axis_hit_scaled);
    w.kv("trend_valid", res.trend_valid);
    w.key("axis_trend_fit");
    w.begin_object();
    w.kv("slope", res.trend.slope);
    w.kv("slope_stderr", res.trend.slope_stderr);
    w.kv("points", res.trend.points);
    w.end_object();
    w.end_object();
  }
  {
    auto os = open_out(out_dir, "hitting_table.tsv", files);
    const int d = res.table.probabilities.empty()
                      ? 0
                      : res.table.probabilities.begin()->first.dim;
    std::vector<std::string> cols;
    for (int i = 0; i < d; ++i) cols.push_back("z" + std::to_string(i + 1));
    cols.push_back("probability");
    TableWriter table(os, cols);
    std::vector<std::pair<Site, double>> rows(res.table.probabilities.begin(),
                                              res.table.probabilities.end());
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [site, prob] : rows) {
      for (int i = 0; i < site.dim; ++i) table.cell(static_cast<std::int64_t>(site[i]));
      table.cell(prob);
      table.end_row();
    }
  }
  return files;
}

std::vector<std::string> write_selftest(const SelftestResult& res, const ExperimentConfig& cfg,
                                        const std::string& out_dir) {
  std::vector<std::string> files;
  auto os = open_out(out_dir, "selftest_summary.json", files);
  JsonWriter w(os);
  w.begin_object();
  w.kv("experiment", "selftest");
  write_config_echo(w, cfg);
  w.kv("checks", static_cast<std::int64_t>(res.checks.size()));
  w.kv("failures", res.failures);
  w.key("results");
  w.begin_array();
  for (const auto& c : res.checks) {
    w.begin_object();
    w.kv("name", c.name);
    w.kv("pass", c.pass);
    if (!c.detail.empty()) w.kv("detail", c.detail);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return files;
}

void write_meta(const std::string& out_dir, const std::string& name, double elapsed_seconds,
                int threads) {
  fs::create_directories(out_dir);
  std::ofstream os(fs::path(out_dir) / (name + "_meta.json"));
  JsonWriter w(os);
  const auto now = std::chrono::system_clock::now();
  const auto epoch_s =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  w.begin_object();
  w.kv("experiment", name);
  w.kv("unix_timestamp", static_cast<std::int64_t>(epoch_s));
  w.kv("elapsed_seconds", elapsed_seconds);
  w.kv("threads", threads);
  w.end_object();
}

}  // namespace rwre
