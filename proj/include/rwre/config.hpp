// Experiment configuration: a JSON document with a schema version. Unknown
// keys are errors; per-subcommand validation checks the keys it consumes.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwre/env_dist.hpp"
#include "rwre/oracle.hpp"
#include "rwre/scaled_path.hpp"

namespace rwre {

struct PathDumpOptions {
  std::string format = "none";  // none | tsv | binary
  std::int64_t limit = 4;       // replicas dumped
};

struct ExperimentConfig {
  int schema_version = 1;
  int dimension = 2;
  std::uint64_t master_seed = 0;
  std::int64_t replicas = 1;
  std::int64_t horizon = 1;
  int threads = 0;  // 0: RWRE_THREADS or hardware
  EnvDistribution environment = EnvDistribution::point_mass(TransitionKernel::uniform(2), 0.25);

  // simulate
  std::optional<std::int64_t> scale_n;
  std::optional<std::vector<double>> speed;  // centering v; estimated when absent
  PathDumpOptions path_dump;

  // regen
  std::optional<std::int64_t> margin;  // empty: default policy
  std::string direction = "e1";        // e1 | v | both
  std::vector<double> moment_orders = {1.0, 2.0};
  std::int64_t attempts = 10000;       // event-D rejection attempts
  std::int64_t pilot_replicas = 400;
  std::int64_t pilot_horizon = 4000;

  // intersect
  std::vector<std::int64_t> k_grid;
  std::vector<std::int64_t> r_grid;
  std::int64_t horizon_multiplier = 10;
  std::optional<std::int64_t> slab_w;
  std::optional<std::int64_t> slab_k;
  std::vector<std::int64_t> in_grid;  // N values for mean I_N

  // clt / series
  std::vector<std::int64_t> n_grid;
  std::int64_t n_env = 128;
  std::int64_t walks_per_env = 16;
  FunctionalSpec functional = FunctionalSpec::capped_supnorm();
  std::int64_t ks_walks = 2000;
  std::int64_t ks_env_seeds = 10;
  double series_b = 1.5;
  std::int64_t series_m_lo = 4;
  std::int64_t series_m_hi = 10;

  // oracle
  std::int64_t oracle_horizon = 4;
  std::vector<std::int64_t> oracle_start;
  std::int64_t coupling_trials = 20;
  std::int64_t coupling_horizon = 3;
  std::optional<StepDistribution> step_distribution;
  std::int64_t k_max = 20;
  std::int64_t transverse_radius = -1;  // -1: minimal safe radius
};

// Parses and validates the common schema. Throws config_error with a
// diagnostic on any problem, including unknown keys.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Subcommand-specific requirements (grids present and increasing, bounds).
void validate_for_subcommand(const ExperimentConfig& cfg, const std::string& subcommand);

// Thread-count resolution: explicit flag > config > RWRE_THREADS > hardware.
int effective_threads(const ExperimentConfig& cfg, int flag_override);

}  // namespace rwre
