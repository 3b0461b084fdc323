#include "rwre/walk.hpp"

#include <stdexcept>

namespace rwre {

WalkPath WalkPath::from_steps(const Site& start, const std::vector<int>& dirs) {
  WalkPath p;
  p.start = start;
  p.positions.reserve(dirs.size() + 1);
  p.positions.push_back(start);
  for (int d : dirs) p.positions.push_back(step_to(p.positions.back(), d));
  return p;
}

Site step(const LazyEnvironment& env, const Site& site, RngStream& stream) {
  const TransitionKernel k = env.kernel_at(site);
  return step_to(site, sample_direction(k, stream.next_unit()));
}

void simulate_path_into(const LazyEnvironment& env, const Site& start, std::int64_t horizon,
                        std::uint64_t walk_seed, WalkPath& out) {
  if (horizon < 0) throw std::invalid_argument("simulate_path: horizon must be >= 0");
  if (start.dim != env.dim())
    throw std::invalid_argument("simulate_path: start dimension does not match the environment");
  out.start = start;
  out.walk_seed = walk_seed;
  out.positions.clear();
  out.positions.reserve(static_cast<std::size_t>(horizon) + 1);
  out.positions.push_back(start);
  RngStream stream(walk_seed);
  Site x = start;
  for (std::int64_t t = 0; t < horizon; ++t) {
    x = step(env, x, stream);
    out.positions.push_back(x);
  }
}

WalkPath simulate_path(const LazyEnvironment& env, const Site& start, std::int64_t horizon,
                       std::uint64_t walk_seed) {
  WalkPath p;
  simulate_path_into(env, start, horizon, walk_seed, p);
  return p;
}

std::pair<WalkPath, WalkPath> simulate_pair(const PairMode& mode, const EnvDistribution& dist,
                                            const std::pair<Site, Site>& starts,
                                            std::int64_t horizon, const PairSeeds& seeds) {
  switch (mode.kind) {
    case PairMode::Kind::SameEnv: {
      LazyEnvironment env(dist, seeds.env1);
      return {simulate_path(env, starts.first, horizon, seeds.walk1),
              simulate_path(env, starts.second, horizon, seeds.walk2)};
    }
    case PairMode::Kind::IndependentEnvs: {
      LazyEnvironment env1(dist, seeds.env1);
      LazyEnvironment env2(dist, seeds.env2);
      return {simulate_path(env1, starts.first, horizon, seeds.walk1),
              simulate_path(env2, starts.second, horizon, seeds.walk2)};
    }
    case PairMode::Kind::Coupled: {
      CoupledTriple triple = make_coupled_triple(
          mode.lambda1, mode.lambda2, dist,
          TripleSeeds{seeds.env1, seeds.env2, seeds.env3, seeds.shared});
      if (mode.leg == PairMode::CoupledLeg::IndependentSides)
        return {simulate_path(triple.env1, starts.first, horizon, seeds.walk1),
                simulate_path(triple.env2, starts.second, horizon, seeds.walk2)};
      return {simulate_path(triple.env3, starts.first, horizon, seeds.walk1),
              simulate_path(triple.env3, starts.second, horizon, seeds.walk2)};
    }
  }
  throw std::logic_error("simulate_pair: unreachable");
}

}  // namespace rwre
