#include "rwre/environment.hpp"

#include <array>
#include <stdexcept>

namespace rwre {

namespace {

std::uint64_t site_stream_key(std::uint64_t base, const Site& site) {
  std::uint64_t h = derive_key(base, StreamRole::Environment);
  for (int i = 0; i < site.dim; ++i)
    h = fold(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(site[i])));
  return h;
}

}  // namespace

LazyEnvironment::LazyEnvironment(EnvDistribution dist, std::uint64_t env_seed)
    : LazyEnvironment(std::move(dist), env_seed, nullptr, 0) {}

LazyEnvironment::LazyEnvironment(EnvDistribution dist, std::uint64_t env_seed,
                                 std::shared_ptr<const SiteSet> overlay_sites,
                                 std::uint64_t overlay_seed)
    : dist_(std::move(dist)),
      env_seed_(env_seed),
      overlay_sites_(std::move(overlay_sites)),
      overlay_seed_(overlay_seed),
      shards_(std::make_shared<std::array<Shard, kShards>>()) {
  if (dist_.family() == EnvDistribution::Family::PointMass && !overlay_sites_) {
    constant_ = true;
    constant_kernel_ = dist_.support().front().kernel;
  }
}

std::uint64_t LazyEnvironment::key_for(const Site& site) const {
  if (overlay_sites_ && overlay_sites_->count(site)) return site_stream_key(overlay_seed_, site);
  return site_stream_key(env_seed_, site);
}

TransitionKernel LazyEnvironment::derive(const Site& site) const {
  if (site.dim != dist_.dim())
    throw std::invalid_argument("kernel_at: site dimension does not match the environment");
  RngStream stream(key_for(site));
  return dist_.sample(stream);
}

TransitionKernel LazyEnvironment::kernel_at(const Site& site) const {
  if (constant_) {
    if (site.dim != dist_.dim())
      throw std::invalid_argument("kernel_at: site dimension does not match the environment");
    return constant_kernel_;
  }
  Shard& shard = (*shards_)[SiteHash{}(site) % kShards];
  {
    std::lock_guard<std::mutex> lock(shard.mu);
    auto it = shard.map.find(site);
    if (it != shard.map.end()) return it->second;
  }
  TransitionKernel k = derive(site);
  {
    std::lock_guard<std::mutex> lock(shard.mu);
    if (shard.map.size() < kMaxEntriesPerShard) shard.map.emplace(site, k);
  }
  return k;
}

CoupledTriple make_coupled_triple(const WalkPath& lambda1, const WalkPath& lambda2,
                                  const EnvDistribution& dist, const TripleSeeds& seeds) {
  if (!lambda1.valid() || !lambda2.valid())
    throw std::invalid_argument("make_coupled_triple: lambdas must be valid nearest-neighbor paths");
  auto set1 = std::make_shared<SiteSet>();
  auto set2 = std::make_shared<SiteSet>();
  auto both = std::make_shared<SiteSet>();
  for (const auto& s : lambda1.positions) {
    set1->insert(s);
    both->insert(s);
  }
  for (const auto& s : lambda2.positions) {
    set2->insert(s);
    both->insert(s);
  }
  const std::uint64_t jseed = derive_key(seeds.shared, StreamRole::SharedField);
  return CoupledTriple{
      LazyEnvironment(dist, derive_key(seeds.eta1, StreamRole::Environment), set1, jseed),
      LazyEnvironment(dist, derive_key(seeds.eta2, StreamRole::Environment2), set2, jseed),
      LazyEnvironment(dist, derive_key(seeds.eta3, StreamRole::Environment3), both, jseed),
      lambda1, lambda2, seeds.shared};
}

}  // namespace rwre
