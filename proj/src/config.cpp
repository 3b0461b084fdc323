#include "rwre/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "schema_version", "dimension", "master_seed", "replicas", "horizon", "threads",
      "environment",
      // simulate
      "scale_n", "speed", "path_dump",
      // regen
      "margin", "direction", "moment_orders", "attempts", "pilot_replicas", "pilot_horizon",
      // intersect
      "k_grid", "r_grid", "horizon_multiplier", "slab_w", "slab_k", "in_grid",
      // clt / series
      "n_grid", "n_env", "walks_per_env", "functional", "ks_walks", "ks_env_seeds",
      "series_b", "series_m_range",
      // oracle
      "oracle_horizon", "oracle_start", "coupling_trials", "coupling_horizon",
      "step_distribution", "k_max", "transverse_radius"};
  return keys;
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error("config: bad value for '" + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw config_error("config: missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error("config: bad value for '" + key + "': " + e.what());
  }
}

TransitionKernel kernel_from_json(const json& arr, int dimension, const std::string& what) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(2 * dimension))
    throw config_error("config: " + what + " must be an array of 2*dimension probabilities");
  std::vector<double> probs;
  for (const auto& x : arr) probs.push_back(x.get<double>());
  return TransitionKernel::from(probs);
}

EnvDistribution environment_from_json(const json& env, int dimension) {
  if (!env.is_object()) throw config_error("config: environment must be an object");
  static const std::set<std::string> env_keys = {"family", "kappa",       "kernel",
                                                 "components", "base_kernel", "epsilon"};
  for (const auto& [key, value] : env.items())
    if (!env_keys.count(key)) throw config_error("config: unknown environment key '" + key + "'");
  const std::string family = require<std::string>(env, "family");
  const double kappa = require<double>(env, "kappa");
  if (family == "point_mass")
    return EnvDistribution::point_mass(kernel_from_json(env.at("kernel"), dimension, "kernel"),
                                       kappa);
  if (family == "finite_mixture") {
    if (!env.contains("components") || !env.at("components").is_array())
      throw config_error("config: finite_mixture needs a components array");
    std::vector<MixtureComponent> comps;
    for (const auto& c : env.at("components"))
      comps.push_back(MixtureComponent{kernel_from_json(c.at("kernel"), dimension, "kernel"),
                                       require<double>(c, "weight")});
    return EnvDistribution::finite_mixture(std::move(comps), kappa);
  }
  if (family == "perturbed_drift")
    return EnvDistribution::perturbed_drift(
        kernel_from_json(env.at("base_kernel"), dimension, "base_kernel"),
        require<double>(env, "epsilon"), kappa);
  throw config_error("config: unknown environment family '" + family + "'");
}

FunctionalSpec functional_from_json(const json& f, int dimension) {
  if (!f.is_object()) throw config_error("config: functional must be an object");
  static const std::set<std::string> keys = {"kind", "t0", "coordinate", "bound",
                                             "center", "width", "T"};
  for (const auto& [key, value] : f.items())
    if (!keys.count(key)) throw config_error("config: unknown functional key '" + key + "'");
  const std::string kind = require<std::string>(f, "kind");
  const double T = get_or<double>(f, "T", 1.0);
  if (kind == "clipped_coordinate") {
    const int coord = get_or<int>(f, "coordinate", 0);
    if (coord < 0 || coord >= dimension)
      throw config_error("config: functional coordinate out of range");
    return FunctionalSpec::clipped_coordinate(get_or<double>(f, "t0", T), coord,
                                              get_or<double>(f, "bound", 1.0), T);
  }
  if (kind == "capped_supnorm") return FunctionalSpec::capped_supnorm(T);
  if (kind == "smoothed_indicator") {
    std::vector<double> center = get_or<std::vector<double>>(f, "center", {});
    if (center.empty()) center.assign(static_cast<std::size_t>(dimension), 0.0);
    if (center.size() != static_cast<std::size_t>(dimension))
      throw config_error("config: functional center dimension mismatch");
    return FunctionalSpec::smoothed_indicator(std::move(center), get_or<double>(f, "width", 1.0),
                                              T);
  }
  throw config_error("config: unknown functional kind '" + kind + "'");
}

std::vector<std::int64_t> grid_from_json(const json& j, const std::string& key,
                                         bool strictly_increasing) {
  std::vector<std::int64_t> grid;
  for (const auto& x : j) grid.push_back(x.get<std::int64_t>());
  if (strictly_increasing)
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (grid[i] <= grid[i - 1])
        throw config_error("config: " + key + " must be strictly increasing");
  return grid;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: parse failure: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: document must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known_keys().count(key)) throw config_error("config: unknown key '" + key + "'");

  ExperimentConfig cfg;
  cfg.schema_version = require<int>(j, "schema_version");
  if (cfg.schema_version != 1)
    throw config_error("config: unsupported schema_version " +
                       std::to_string(cfg.schema_version));
  cfg.dimension = require<int>(j, "dimension");
  if (cfg.dimension < 2 || cfg.dimension > kMaxDim)
    throw config_error("config: dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  cfg.master_seed = require<std::uint64_t>(j, "master_seed");
  cfg.replicas = get_or<std::int64_t>(j, "replicas", 1);
  if (cfg.replicas < 1) throw config_error("config: replicas must be >= 1");
  cfg.horizon = get_or<std::int64_t>(j, "horizon", 1);
  if (cfg.horizon < 1) throw config_error("config: horizon must be >= 1");
  cfg.threads = get_or<int>(j, "threads", 0);
  if (j.contains("threads") && cfg.threads < 1)
    throw config_error("config: threads must be >= 1");
  cfg.environment = environment_from_json(j.at("environment"), cfg.dimension);

  if (j.contains("scale_n")) cfg.scale_n = require<std::int64_t>(j, "scale_n");
  if (j.contains("speed")) {
    cfg.speed = require<std::vector<double>>(j, "speed");
    if (cfg.speed->size() != static_cast<std::size_t>(cfg.dimension))
      throw config_error("config: speed dimension mismatch");
  }
  if (j.contains("path_dump")) {
    const json& pd = j.at("path_dump");
    cfg.path_dump.format = require<std::string>(pd, "format");
    if (cfg.path_dump.format != "none" && cfg.path_dump.format != "tsv" &&
        cfg.path_dump.format != "binary")
      throw config_error("config: path_dump format must be none|tsv|binary");
    cfg.path_dump.limit = get_or<std::int64_t>(pd, "limit", 4);
  }

  if (j.contains("margin")) {
    if (!j.at("margin").is_null()) {
      cfg.margin = require<std::int64_t>(j, "margin");
      if (*cfg.margin < 0) throw config_error("config: margin must be >= 0");
    }
  }
  cfg.direction = get_or<std::string>(j, "direction", "e1");
  if (cfg.direction != "e1" && cfg.direction != "v" && cfg.direction != "both")
    throw config_error("config: direction must be e1|v|both");
  cfg.moment_orders = get_or<std::vector<double>>(j, "moment_orders", {1.0, 2.0});
  cfg.attempts = get_or<std::int64_t>(j, "attempts", 10000);
  if (cfg.attempts < 1) throw config_error("config: attempts must be >= 1");
  cfg.pilot_replicas = get_or<std::int64_t>(j, "pilot_replicas", 400);
  cfg.pilot_horizon = get_or<std::int64_t>(j, "pilot_horizon", 4000);

  if (j.contains("k_grid")) cfg.k_grid = grid_from_json(j.at("k_grid"), "k_grid", true);
  if (j.contains("r_grid")) cfg.r_grid = grid_from_json(j.at("r_grid"), "r_grid", true);
  cfg.horizon_multiplier = get_or<std::int64_t>(j, "horizon_multiplier", 10);
  if (j.contains("slab_w")) cfg.slab_w = require<std::int64_t>(j, "slab_w");
  if (j.contains("slab_k")) cfg.slab_k = require<std::int64_t>(j, "slab_k");
  if (j.contains("in_grid")) cfg.in_grid = grid_from_json(j.at("in_grid"), "in_grid", true);

  if (j.contains("n_grid")) cfg.n_grid = grid_from_json(j.at("n_grid"), "n_grid", true);
  cfg.n_env = get_or<std::int64_t>(j, "n_env", 128);
  cfg.walks_per_env = get_or<std::int64_t>(j, "walks_per_env", 16);
  if (j.contains("functional")) cfg.functional = functional_from_json(j.at("functional"), cfg.dimension);
  cfg.ks_walks = get_or<std::int64_t>(j, "ks_walks", 2000);
  cfg.ks_env_seeds = get_or<std::int64_t>(j, "ks_env_seeds", 10);
  cfg.series_b = get_or<double>(j, "series_b", 1.5);
  if (!(cfg.series_b > 1.0) || cfg.series_b > 2.0)
    throw config_error("config: series_b must lie in (1, 2]");
  if (j.contains("series_m_range")) {
    const auto range = grid_from_json(j.at("series_m_range"), "series_m_range", true);
    if (range.size() != 2) throw config_error("config: series_m_range must be [lo, hi]");
    cfg.series_m_lo = range[0];
    cfg.series_m_hi = range[1];
  }

  cfg.oracle_horizon = get_or<std::int64_t>(j, "oracle_horizon", 4);
  if (j.contains("oracle_start")) {
    cfg.oracle_start = grid_from_json(j.at("oracle_start"), "oracle_start", false);
    if (cfg.oracle_start.size() != static_cast<std::size_t>(cfg.dimension))
      throw config_error("config: oracle_start dimension mismatch");
  }
  cfg.coupling_trials = get_or<std::int64_t>(j, "coupling_trials", 20);
  cfg.coupling_horizon = get_or<std::int64_t>(j, "coupling_horizon", 3);
  if (j.contains("step_distribution")) {
    std::vector<StepAtom> atoms;
    for (const auto& a : j.at("step_distribution")) {
      const auto disp = a.at("displacement").get<std::vector<std::int64_t>>();
      if (disp.size() != static_cast<std::size_t>(cfg.dimension))
        throw config_error("config: step displacement dimension mismatch");
      StepAtom atom;
      atom.displacement = Site::zero(cfg.dimension);
      for (int i = 0; i < cfg.dimension; ++i)
        atom.displacement[i] = static_cast<std::int32_t>(disp[static_cast<std::size_t>(i)]);
      atom.probability = require<double>(a, "probability");
      atoms.push_back(atom);
    }
    cfg.step_distribution = StepDistribution::make(std::move(atoms));
  }
  cfg.k_max = get_or<std::int64_t>(j, "k_max", 20);
  cfg.transverse_radius = get_or<std::int64_t>(j, "transverse_radius", -1);

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_for_subcommand(const ExperimentConfig& cfg, const std::string& subcommand) {
  if (subcommand == "simulate" || subcommand == "regen") {
    if (cfg.replicas < 2) throw config_error(subcommand + ": needs replicas >= 2");
    return;
  }
  if (subcommand == "intersect") {
    if (cfg.k_grid.empty()) throw config_error("intersect: k_grid is required");
    if (cfg.replicas < 100) throw config_error("intersect: needs replicas >= 100");
    return;
  }
  if (subcommand == "clt") {
    if (cfg.n_grid.empty()) throw config_error("clt: n_grid is required");
    if (cfg.n_env < 2) throw config_error("clt: n_env must be >= 2");
    if (cfg.walks_per_env < 2) throw config_error("clt: walks_per_env must be >= 2");
    return;
  }
  if (subcommand == "series") {
    if (cfg.n_env < 2) throw config_error("series: n_env must be >= 2");
    if (cfg.walks_per_env < 2) throw config_error("series: walks_per_env must be >= 2");
    if (cfg.series_m_lo > cfg.series_m_hi) throw config_error("series: empty m range");
    return;
  }
  if (subcommand == "oracle-quenched") {
    if (cfg.oracle_horizon < 0 || cfg.oracle_horizon > kMaxEnumerationHorizon)
      throw config_error("oracle quenched: horizon must lie in [0, " +
                         std::to_string(kMaxEnumerationHorizon) + "]");
    return;
  }
  if (subcommand == "oracle-coupling") {
    if (!cfg.environment.finite_support())
      throw config_error("oracle coupling: requires a finite-support environment family");
    if (cfg.coupling_horizon < 1 || cfg.coupling_horizon > kMaxCouplingHorizon)
      throw config_error("oracle coupling: horizon must lie in [1, " +
                         std::to_string(kMaxCouplingHorizon) + "]");
    if (cfg.coupling_trials < 1) throw config_error("oracle coupling: trials must be >= 1");
    return;
  }
  if (subcommand == "oracle-hitting") {
    if (!cfg.step_distribution) throw config_error("oracle hitting: step_distribution is required");
    if (cfg.k_max < 1) throw config_error("oracle hitting: k_max must be >= 1");
    return;
  }
  if (subcommand == "selftest") return;
  throw config_error("unknown subcommand '" + subcommand + "'");
}

int effective_threads(const ExperimentConfig& cfg, int flag_override) {
  if (flag_override > 0) return flag_override;
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("RWRE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return resolve_thread_count(0);
}

}  // namespace rwre
