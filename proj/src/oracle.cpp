#include "rwre/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

EndpointLaw enumerate_quenched_law(const LazyEnvironment& env, const Site& start,
                                   std::int64_t horizon) {
  if (horizon < 0) throw std::invalid_argument("enumerate_quenched_law: negative horizon");
  if (horizon > kMaxEnumerationHorizon)
    throw config_error("enumerate_quenched_law: horizon " + std::to_string(horizon) +
                       " exceeds the enumeration bound " +
                       std::to_string(kMaxEnumerationHorizon));
  EndpointLaw law;
  law[start] = 1.0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    EndpointLaw next;
    next.reserve(law.size() * 2 * static_cast<std::size_t>(env.dim()));
    for (const auto& [site, prob] : law) {
      const TransitionKernel k = env.kernel_at(site);
      for (int dir = 0; dir < k.directions(); ++dir)
        next[step_to(site, dir)] += prob * k.prob(dir);
    }
    law = std::move(next);
  }
  return law;
}

namespace {

// Per-site multiset of directions a pinned path steps along from that site.
using StepProfile = std::unordered_map<Site, std::vector<int>, SiteHash>;

StepProfile step_profile(const WalkPath& lambda, std::int64_t T) {
  StepProfile prof;
  for (std::int64_t t = 0; t < T; ++t) {
    const Site& a = lambda.at(t);
    const Site& b = lambda.at(t + 1);
    int dir = -1;
    for (int i = 0; i < 2 * a.dim; ++i)
      if (step_to(a, i) == b) {
        dir = i;
        break;
      }
    if (dir < 0) throw std::invalid_argument("coupling: lambda is not nearest-neighbor");
    prof[a].push_back(dir);
  }
  return prof;
}

// Sum over all kernel assignments on `sites` of P(assignment) * prod over
// profiles of the pinned-path probability under that assignment.
double enumerate_pinned_probability(const std::vector<Site>& sites,
                                    const std::vector<const StepProfile*>& profiles,
                                    const std::vector<MixtureComponent>& support) {
  const std::size_t S = support.size();
  // Per-site, per-component factor: weight * prod of kernel probs of the
  // directions stepped from that site (by every profile).
  std::vector<std::vector<double>> factors(sites.size(), std::vector<double>(S, 0.0));
  for (std::size_t zi = 0; zi < sites.size(); ++zi) {
    for (std::size_t c = 0; c < S; ++c) {
      double f = support[c].weight;
      for (const StepProfile* prof : profiles) {
        auto it = prof->find(sites[zi]);
        if (it == prof->end()) continue;
        for (int dir : it->second) f *= support[c].kernel.prob(dir);
      }
      factors[zi][c] = f;
    }
  }
  // Explicit product over the assignment lattice (odometer enumeration).
  std::uint64_t total = 1;
  for (std::size_t zi = 0; zi < sites.size(); ++zi) {
    if (total > kMaxCouplingAssignments / S)
      throw config_error("coupling: assignment count exceeds the enumeration bound");
    total *= S;
  }
  std::vector<std::size_t> idx(sites.size(), 0);
  double sum = 0.0;
  for (std::uint64_t a = 0; a < total; ++a) {
    double prod = 1.0;
    for (std::size_t zi = 0; zi < sites.size(); ++zi) prod *= factors[zi][idx[zi]];
    sum += prod;
    for (std::size_t zi = 0; zi < sites.size(); ++zi) {
      if (++idx[zi] < S) break;
      idx[zi] = 0;
    }
  }
  return sum;
}

}  // namespace

double verify_coupling_identity(const WalkPath& lambda1, const WalkPath& lambda2,
                                const EnvDistribution& dist, std::int64_t T1, std::int64_t T2) {
  if (!dist.finite_support())
    throw config_error("verify_coupling_identity: requires a finite-support family");
  if (T1 < 0 || T2 < 0 || T1 > kMaxCouplingHorizon || T2 > kMaxCouplingHorizon)
    throw config_error("verify_coupling_identity: horizons must lie in [0, " +
                       std::to_string(kMaxCouplingHorizon) + "]");
  if (T1 > lambda1.horizon() || T2 > lambda2.horizon())
    throw std::invalid_argument("verify_coupling_identity: T exceeds a lambda horizon");
  if (!lambda1.valid() || !lambda2.valid())
    throw std::invalid_argument("verify_coupling_identity: invalid lambda path");

  // Non-intersection indicator over the pinned ranges. If the ranges meet,
  // both sides carry the indicator and vanish.
  SiteSet range1;
  for (std::int64_t t = 0; t <= T1; ++t) range1.insert(lambda1.at(t));
  for (std::int64_t t = 0; t <= T2; ++t)
    if (range1.count(lambda2.at(t))) return 0.0;

  const StepProfile prof1 = step_profile(lambda1, T1);
  const StepProfile prof2 = step_profile(lambda2, T2);
  const auto& support = dist.support();

  const auto site_list = [](const StepProfile& p) {
    std::vector<Site> v;
    v.reserve(p.size());
    for (const auto& [site, dirs] : p) v.push_back(site);
    std::sort(v.begin(), v.end());
    return v;
  };
  const std::vector<Site> sites1 = site_list(prof1);
  const std::vector<Site> sites2 = site_list(prof2);
  std::vector<Site> sites_union = sites1;
  sites_union.insert(sites_union.end(), sites2.begin(), sites2.end());
  std::sort(sites_union.begin(), sites_union.end());

  // Independent environments: each path averages over its own assignment.
  const double lhs = enumerate_pinned_probability(sites1, {&prof1}, support) *
                     enumerate_pinned_probability(sites2, {&prof2}, support);
  // One shared environment: a single assignment over the union drives both.
  const double rhs = enumerate_pinned_probability(sites_union, {&prof1, &prof2}, support);
  return std::abs(lhs - rhs);
}

StepDistribution StepDistribution::make(std::vector<StepAtom> atoms) {
  if (atoms.empty()) throw config_error("StepDistribution: no atoms");
  double sum = 0.0;
  bool advancing = true;
  for (const auto& a : atoms) {
    if (a.displacement.dim != atoms.front().displacement.dim)
      throw config_error("StepDistribution: mixed dimensions");
    if (a.probability < 0.0) throw config_error("StepDistribution: negative probability");
    sum += a.probability;
    if (proj_e1(a.displacement) < 1) advancing = false;
  }
  if (std::abs(sum - 1.0) >= kProbSumTol)
    throw config_error("StepDistribution: probabilities must sum to 1 within 1e-12");
  StepDistribution sd;
  sd.atoms = std::move(atoms);
  sd.e1_advancing = advancing;
  return sd;
}

HittingTable hitting_probabilities(const StepDistribution& sd, std::int64_t K_max,
                                   std::int64_t transverse_radius) {
  if (!sd.e1_advancing)
    throw std::invalid_argument(
        "hitting_probabilities: step distribution must advance e1 by >= 1 on every atom");
  if (K_max < 1) throw std::invalid_argument("hitting_probabilities: K_max must be >= 1");

  std::int64_t max_transverse_step = 0;
  for (const auto& a : sd.atoms)
    for (int i = 1; i < a.displacement.dim; ++i)
      max_transverse_step =
          std::max<std::int64_t>(max_transverse_step, std::abs(a.displacement[i]));
  const std::int64_t required_radius = K_max * max_transverse_step;
  if (transverse_radius < required_radius)
    throw config_error("hitting_probabilities: transverse radius " +
                       std::to_string(transverse_radius) + " would leak mass; need >= " +
                       std::to_string(required_radius));

  const int d = sd.dim();
  HittingTable table;
  table.K_max = K_max;

  std::unordered_map<Site, double, SiteHash> alive;
  alive[Site::zero(d)] = 1.0;
  double exited_high = 0.0;

  for (std::int64_t n = 1; n <= K_max && !alive.empty(); ++n) {
    std::unordered_map<Site, double, SiteHash> next;
    next.reserve(alive.size() * sd.atoms.size());
    for (const auto& [site, prob] : alive) {
      for (const auto& atom : sd.atoms) {
        Site z = site;
        for (int i = 0; i < d; ++i) z[i] += atom.displacement[i];
        const double mass = prob * atom.probability;
        if (proj_e1(z) > K_max) {
          exited_high += mass;
          continue;
        }
        bool outside = false;
        for (int i = 1; i < d; ++i)
          if (std::abs(z[i]) > transverse_radius) outside = true;
        if (outside) {
          table.leaked_mass += mass;
          continue;
        }
        next[z] += mass;
        table.probabilities[z] += mass;
      }
    }
    alive = std::move(next);
    double alive_mass = 0.0;
    for (const auto& [site, prob] : alive) alive_mass += prob;
    table.max_conservation_error = std::max(
        table.max_conservation_error,
        std::abs(alive_mass + exited_high + table.leaked_mass - 1.0));
  }

  if (table.leaked_mass > 1e-12)
    throw config_error("hitting_probabilities: transverse leakage " +
                       std::to_string(table.leaked_mass) + " exceeds tolerance; need radius >= " +
                       std::to_string(required_radius));
  return table;
}

double slab_mass(const HittingTable& table, std::int64_t K) {
  if (K < 1 || K > table.K_max)
    throw std::invalid_argument("slab_mass: K must lie in [1, K_max]");
  double sum = 0.0;
  for (const auto& [site, prob] : table.probabilities)
    if (proj_e1(site) == K) sum += prob;
  return sum;
}

}  // namespace rwre
