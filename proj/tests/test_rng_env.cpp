#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>

#include "rwre/environment.hpp"
#include "rwre/errors.hpp"

using namespace rwre;

namespace {

TransitionKernel biased2d() {
  return TransitionKernel::from(std::vector<double>{0.4, 0.1, 0.25, 0.25});
}

TransitionKernel reversed2d() {
  return TransitionKernel::from(std::vector<double>{0.1, 0.4, 0.25, 0.25});
}

EnvDistribution half_half_mixture() {
  return EnvDistribution::finite_mixture({{biased2d(), 0.5}, {reversed2d(), 0.5}}, 0.1);
}

Site site2(int x, int y) {
  Site s = Site::zero(2);
  s[0] = x;
  s[1] = y;
  return s;
}

}  // namespace

TEST_CASE("stream determinism and key separation") {
  RngStream a(derive_key(42, StreamRole::Walk1, 7));
  RngStream b(derive_key(42, StreamRole::Walk1, 7));
  RngStream c(derive_key(42, StreamRole::Walk2, 7));
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
}

TEST_CASE("unit draws live in [0,1) and look uniform") {
  RngStream s(derive_key(1, 2, 3));
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 3.0 / std::sqrt(12.0 * n));
}

TEST_CASE("validate_ellipticity") {
  CHECK(validate_ellipticity(TransitionKernel::uniform(2), 0.1));
  CHECK_FALSE(validate_ellipticity(
      TransitionKernel::from(std::vector<double>{0.5, 0.5, 0.0, 0.0}), 0.05));
  CHECK_FALSE(validate_ellipticity(
      TransitionKernel::from(std::vector<double>{0.4, 0.1, 0.25, 0.249}), 0.05));
}

TEST_CASE("point mass sampling is degenerate") {
  const EnvDistribution pm = EnvDistribution::point_mass(biased2d(), 0.1);
  RngStream s(99);
  for (int i = 0; i < 10; ++i) CHECK(pm.sample(s) == biased2d());
}

TEST_CASE("zero-amplitude perturbation returns the base kernel") {
  const EnvDistribution pd = EnvDistribution::perturbed_drift(biased2d(), 0.0, 0.05);
  RngStream s(7);
  CHECK(pd.sample(s) == biased2d());
}

TEST_CASE("mixture frequencies match the weights") {
  const EnvDistribution mix = half_half_mixture();
  RngStream s(derive_key(2024, 5));
  const int n = 100000;
  int first = 0;
  for (int i = 0; i < n; ++i)
    if (mix.sample(s) == biased2d()) ++first;
  CHECK(std::abs(static_cast<double>(first) / n - 0.5) < 0.01);
}

TEST_CASE("sampled kernels always satisfy the invariants") {
  const EnvDistribution pd = EnvDistribution::perturbed_drift(biased2d(), 0.3, 0.05);
  RngStream s(11);
  for (int i = 0; i < 20000; ++i) {
    const TransitionKernel k = pd.sample(s);
    REQUIRE(std::abs(k.sum() - 1.0) < kProbSumTol);
    REQUIRE(k.min_prob() >= 0.05);
  }
}

TEST_CASE("malformed families are configuration errors") {
  CHECK_THROWS_AS(EnvDistribution::finite_mixture({{biased2d(), 0.6}, {reversed2d(), 0.6}}, 0.1),
                  config_error);
  CHECK_THROWS_AS(EnvDistribution::finite_mixture({}, 0.1), config_error);
  CHECK_THROWS_AS(EnvDistribution::perturbed_drift(biased2d(), 3.0, 0.099), config_error);
  CHECK_THROWS_AS(EnvDistribution::point_mass(biased2d(), 0.3), config_error);  // kappa > min
}

TEST_CASE("kernel_at is memoized and order independent") {
  const EnvDistribution mix = half_half_mixture();
  LazyEnvironment env(mix, 1234);
  const Site a = site2(3, -2);
  const Site b = site2(-1, 5);
  const TransitionKernel ka = env.kernel_at(a);
  const TransitionKernel kb = env.kernel_at(b);
  CHECK(env.kernel_at(a) == ka);
  CHECK(env.kernel_at(a) == env.derive(a));

  LazyEnvironment env2(mix, 1234);
  CHECK(env2.kernel_at(b) == kb);  // queried in the opposite order
  CHECK(env2.kernel_at(a) == ka);
}

TEST_CASE("kernel_at rejects dimension mismatches") {
  LazyEnvironment env(half_half_mixture(), 9);
  CHECK_THROWS_AS(env.kernel_at(Site::zero(3)), std::invalid_argument);
}

TEST_CASE("distinct sites draw independent kernels across seeds") {
  // Two-kernel mixture at weight 1/2: two seeds agree at one site with
  // probability 1/2, so over three probe sites the collision rate is 1/8.
  const EnvDistribution mix = half_half_mixture();
  const Site probes[3] = {site2(0, 0), site2(4, 1), site2(-3, 2)};
  int collisions = 0;
  const int pairs = 1000;
  for (int i = 0; i < pairs; ++i) {
    LazyEnvironment e1(mix, derive_key(555, 2 * i));
    LazyEnvironment e2(mix, derive_key(555, 2 * i + 1));
    bool all_equal = true;
    for (const Site& s : probes)
      if (e1.kernel_at(s) != e2.kernel_at(s)) all_equal = false;
    if (all_equal) ++collisions;
  }
  CHECK(std::abs(static_cast<double>(collisions) / pairs - 0.125) < 0.02);
}

TEST_CASE("concurrent first queries agree") {
  const EnvDistribution mix = half_half_mixture();
  LazyEnvironment env(mix, 77);
  std::vector<TransitionKernel> seen(4);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      TransitionKernel k = env.kernel_at(site2(10, 10));
      for (int i = 0; i < 1000; ++i) k = env.kernel_at(site2(i % 7, i % 5));
      seen[static_cast<std::size_t>(t)] = env.kernel_at(site2(10, 10));
    });
  for (auto& t : pool) t.join();
  for (int t = 1; t < 4; ++t) CHECK(seen[static_cast<std::size_t>(t)] == seen[0]);
}

TEST_CASE("coupled triple agrees on the designated paths") {
  const EnvDistribution mix = half_half_mixture();
  const WalkPath l1 = WalkPath::from_steps(site2(0, 0), {0, 2, 0});
  const WalkPath l2 = WalkPath::from_steps(site2(5, 0), {0, 3, 0});
  const CoupledTriple triple = make_coupled_triple(l1, l2, mix, TripleSeeds{10, 20, 30, 40});

  for (const Site& s : l1.positions) CHECK(triple.env1.kernel_at(s) == triple.env3.kernel_at(s));
  for (const Site& s : l2.positions) CHECK(triple.env2.kernel_at(s) == triple.env3.kernel_at(s));

  SUBCASE("single-site lambdas match the construction example") {
    const WalkPath p1 = WalkPath::from_steps(site2(0, 0), {});
    const WalkPath p2 = WalkPath::from_steps(site2(5, 0), {});
    const CoupledTriple t2 = make_coupled_triple(p1, p2, mix, TripleSeeds{1, 2, 3, 4});
    CHECK(t2.env1.kernel_at(site2(0, 0)) == t2.env3.kernel_at(site2(0, 0)));
    CHECK(t2.env2.kernel_at(site2(5, 0)) == t2.env3.kernel_at(site2(5, 0)));
  }
}

TEST_CASE("off-path sites use independent fields") {
  const EnvDistribution mix = half_half_mixture();
  const WalkPath l1 = WalkPath::from_steps(site2(0, 0), {0});
  const WalkPath l2 = WalkPath::from_steps(site2(7, 0), {0});
  // A site away from both paths: env1 and env3 disagree with the mixture
  // collision probability 1/2 across repeated triples.
  int differ = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    const CoupledTriple triple = make_coupled_triple(
        l1, l2, mix, TripleSeeds{derive_key(1, i), derive_key(2, i), derive_key(3, i), derive_key(4, i)});
    if (triple.env1.kernel_at(site2(-5, -5)) != triple.env3.kernel_at(site2(-5, -5))) ++differ;
  }
  CHECK(std::abs(static_cast<double>(differ) / trials - 0.5) < 0.05);
}

TEST_CASE("point mass environments are constant") {
  const EnvDistribution pm = EnvDistribution::point_mass(biased2d(), 0.1);
  LazyEnvironment env(pm, 31337);
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y) CHECK(env.kernel_at(site2(x, y)) == biased2d());
}
