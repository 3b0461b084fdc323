// Lazily realized i.i.d. environments. The kernel at a site is a pure
// function of (env_seed, site): the memo is only a cache, so query order,
// replay, and concurrent first-queries all see the same field omega.
//
// An optional overlay redirects the sites of designated paths to a shared
// randomness field; that is exactly the three-environment coupling device.
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "rwre/env_dist.hpp"
#include "rwre/path.hpp"

namespace rwre {

using SiteSet = std::unordered_set<Site, SiteHash>;

class LazyEnvironment {
 public:
  LazyEnvironment(EnvDistribution dist, std::uint64_t env_seed);
  LazyEnvironment(EnvDistribution dist, std::uint64_t env_seed,
                  std::shared_ptr<const SiteSet> overlay_sites, std::uint64_t overlay_seed);

  // Memoized lookup; safe for concurrent use. Throws std::invalid_argument on
  // a dimension mismatch.
  TransitionKernel kernel_at(const Site& site) const;

  // The underlying pure derivation, bypassing the cache (used by tests).
  TransitionKernel derive(const Site& site) const;

  const EnvDistribution& dist() const { return dist_; }
  std::uint64_t env_seed() const { return env_seed_; }
  int dim() const { return dist_.dim(); }

 private:
  std::uint64_t key_for(const Site& site) const;

  EnvDistribution dist_;
  std::uint64_t env_seed_ = 0;
  std::shared_ptr<const SiteSet> overlay_sites_;
  std::uint64_t overlay_seed_ = 0;

  // Copies of an environment share the cache, so walkers in one experiment
  // see one store. Sharded to keep contention low; capacity-capped because
  // the cache is semantically transparent.
  static constexpr int kShards = 16;
  static constexpr std::size_t kMaxEntriesPerShard = 1u << 15;
  struct Shard {
    std::mutex mu;
    std::unordered_map<Site, TransitionKernel, SiteHash> map;
  };
  std::shared_ptr<std::array<Shard, kShards>> shards_;
  bool constant_ = false;           // PointMass fast path
  TransitionKernel constant_kernel_;
};

// The coupling construction: env1 and env3 agree on lambda1, env2 and env3
// agree on lambda2 (through the shared field J keyed by shared_seed), and all
// remaining sites use three mutually independent fields.
struct CoupledTriple {
  LazyEnvironment env1, env2, env3;
  WalkPath lambda1, lambda2;
  std::uint64_t shared_seed = 0;
};

struct TripleSeeds {
  std::uint64_t eta1 = 0, eta2 = 0, eta3 = 0, shared = 0;
};

CoupledTriple make_coupled_triple(const WalkPath& lambda1, const WalkPath& lambda2,
                                  const EnvDistribution& dist, const TripleSeeds& seeds);

}  // namespace rwre
