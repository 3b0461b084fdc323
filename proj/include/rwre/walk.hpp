// Quenched walk simulation: single walks and pairs (shared environment,
// independent environments, or the coupled triple). Walk randomness is keyed
// separately from environment randomness, so resampling a walk in a frozen
// environment is a first-class operation.
#pragma once

#include <cstdint>
#include <utility>

#include "rwre/environment.hpp"
#include "rwre/path.hpp"

namespace rwre {

// One Markov step from `site` under the environment's kernel there.
Site step(const LazyEnvironment& env, const Site& site, RngStream& stream);

WalkPath simulate_path(const LazyEnvironment& env, const Site& start, std::int64_t horizon,
                       std::uint64_t walk_seed);

// Buffer-reusing variant for hot loops.
void simulate_path_into(const LazyEnvironment& env, const Site& start, std::int64_t horizon,
                        std::uint64_t walk_seed, WalkPath& out);

struct PairMode {
  enum class Kind { SameEnv, IndependentEnvs, Coupled };
  // For Coupled: which legs of the triple the pair evolves in.
  enum class CoupledLeg { IndependentSides, SharedSide };

  Kind kind = Kind::SameEnv;
  WalkPath lambda1, lambda2;  // Coupled only
  CoupledLeg leg = CoupledLeg::SharedSide;

  static PairMode same_env() { return PairMode{}; }
  static PairMode independent_envs() { return PairMode{Kind::IndependentEnvs, {}, {}, {}}; }
  static PairMode coupled(WalkPath l1, WalkPath l2, CoupledLeg leg) {
    return PairMode{Kind::Coupled, std::move(l1), std::move(l2), leg};
  }
};

struct PairSeeds {
  std::uint64_t env1 = 0;    // SameEnv uses env1 only
  std::uint64_t env2 = 0;
  std::uint64_t env3 = 0;    // Coupled shared-side field
  std::uint64_t shared = 0;  // Coupled J field
  std::uint64_t walk1 = 0;
  std::uint64_t walk2 = 0;
};

std::pair<WalkPath, WalkPath> simulate_pair(const PairMode& mode, const EnvDistribution& dist,
                                            const std::pair<Site, Site>& starts,
                                            std::int64_t horizon, const PairSeeds& seeds);

}  // namespace rwre
