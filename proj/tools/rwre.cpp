// rwre — experiment driver for random walks in random environments on Z^d.
// Subcommands: simulate, regen, intersect, clt, series, oracle, selftest.
#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rwre/config.hpp"
#include "rwre/errors.hpp"
#include "rwre/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int threads_override = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed_override, "override the config master_seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads_override, "worker thread count");
}

rwre::ExperimentConfig load(const CommonOpts& opts, const std::string& subcommand) {
  rwre::ExperimentConfig cfg = rwre::load_config(opts.config_path);
  if (opts.seed_set) cfg.master_seed = opts.seed_override;
  rwre::validate_for_subcommand(cfg, subcommand);
  return cfg;
}

template <class Compute, class Write>
int run_experiment(const CommonOpts& opts, const std::string& name, Compute compute,
                   Write write) {
  const rwre::ExperimentConfig cfg = load(opts, name);
  const int threads = rwre::effective_threads(cfg, opts.threads_override);
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = compute(cfg, threads);
  const auto files = write(result, cfg, opts.out_dir);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rwre::write_meta(opts.out_dir, name, elapsed, threads);
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random walk in random environment laboratory"};
  app.require_subcommand(1);

  CommonOpts simulate_opts, regen_opts, intersect_opts, clt_opts, series_opts, selftest_opts;
  CommonOpts oracle_opts;
  std::string oracle_mode;

  add_common(app.add_subcommand("simulate", "speed and covariance of the scaled endpoint"),
             simulate_opts);
  add_common(app.add_subcommand("regen", "regeneration detection, gap moments, P(D)"),
             regen_opts);
  add_common(app.add_subcommand("intersect", "W_K decay, I_N, A(R)/B(R) rates"), intersect_opts);
  add_common(app.add_subcommand("clt", "quenched variance decay and KS diagnostics"), clt_opts);
  add_common(app.add_subcommand("series", "Bolthausen-Sznitman series summands"), series_opts);
  CLI::App* oracle = app.add_subcommand("oracle", "exact small-instance computations");
  oracle->add_option("mode", oracle_mode, "quenched | coupling | hitting")->required();
  add_common(oracle, oracle_opts);
  add_common(app.add_subcommand("selftest", "fast built-in sanity checks"), selftest_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("simulate"))
      return run_experiment(simulate_opts, "simulate", rwre::compute_simulate,
                            rwre::write_simulate);
    if (app.got_subcommand("regen"))
      return run_experiment(regen_opts, "regen", rwre::compute_regen, rwre::write_regen);
    if (app.got_subcommand("intersect"))
      return run_experiment(intersect_opts, "intersect", rwre::compute_intersect,
                            rwre::write_intersect);
    if (app.got_subcommand("clt"))
      return run_experiment(clt_opts, "clt", rwre::compute_clt, rwre::write_clt);
    if (app.got_subcommand("series"))
      return run_experiment(series_opts, "series", rwre::compute_series, rwre::write_series);
    if (app.got_subcommand("oracle")) {
      if (oracle_mode == "quenched")
        return run_experiment(oracle_opts, "oracle-quenched", rwre::compute_oracle_quenched,
                              rwre::write_oracle_quenched);
      if (oracle_mode == "coupling")
        return run_experiment(oracle_opts, "oracle-coupling", rwre::compute_oracle_coupling,
                              rwre::write_oracle_coupling);
      if (oracle_mode == "hitting")
        return run_experiment(oracle_opts, "oracle-hitting", rwre::compute_oracle_hitting,
                              rwre::write_oracle_hitting);
      std::cerr << "error: unknown oracle mode '" << oracle_mode << "'\n";
      return 2;
    }
    if (app.got_subcommand("selftest")) {
      const rwre::ExperimentConfig cfg = load(selftest_opts, "selftest");
      const int threads = rwre::effective_threads(cfg, selftest_opts.threads_override);
      const rwre::SelftestResult result = rwre::compute_selftest(cfg, threads);
      for (const auto& c : result.checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
                  << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
      rwre::write_selftest(result, cfg, selftest_opts.out_dir);
      rwre::write_meta(selftest_opts.out_dir, "selftest", 0.0, threads);
      std::cout << result.checks.size() - static_cast<std::size_t>(result.failures) << "/"
                << result.checks.size() << " checks passed\n";
      return result.failures == 0 ? 0 : 2;
    }
  } catch (const rwre::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
