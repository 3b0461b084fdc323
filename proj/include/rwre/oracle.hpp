// Exact small-instance computations: quenched endpoint laws by dynamic
// programming, the coupling identity of the three-environment construction
// checked by full enumeration over environment assignments, and slab-by-slab
// hitting probabilities for e1-advancing step walks. Bounds are enforced by
// explicit refusal, never silent truncation.
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/path.hpp"

namespace rwre {

inline constexpr std::int64_t kMaxEnumerationHorizon = 12;
inline constexpr std::int64_t kMaxCouplingHorizon = 6;
inline constexpr std::uint64_t kMaxCouplingAssignments = 1ull << 24;

using EndpointLaw = std::unordered_map<Site, double, SiteHash>;

// Exact endpoint distribution of the quenched walk after `horizon` steps.
// Refuses horizons above kMaxEnumerationHorizon.
EndpointLaw enumerate_quenched_law(const LazyEnvironment& env, const Site& start,
                                   std::int64_t horizon);

// Exact two-sided evaluation of the coupling identity for deterministic paths
// pinned over fixed horizons T1, T2: the probability that each walk traces its
// lambda and the traced ranges do not intersect is the same whether the walks
// run in two independent environments or in one shared environment. Both
// sides are computed by summing over all kernel assignments on the sites the
// paths step from; returns |LHS - RHS|. Requires a finite-support family.
double verify_coupling_identity(const WalkPath& lambda1, const WalkPath& lambda2,
                                const EnvDistribution& dist, std::int64_t T1, std::int64_t T2);

struct StepAtom {
  Site displacement;
  double probability = 0.0;
};

struct StepDistribution {
  std::vector<StepAtom> atoms;
  bool e1_advancing = false;  // every atom has <step, e1> >= 1

  static StepDistribution make(std::vector<StepAtom> atoms);
  int dim() const { return atoms.front().displacement.dim; }
};

struct HittingTable {
  std::int64_t K_max = 0;
  std::unordered_map<Site, double, SiteHash> probabilities;  // levels 1..K_max
  double leaked_mass = 0.0;
  double max_conservation_error = 0.0;
};

// Forward DP over slabs: P(the walk ever hits z) for every z with e1-level in
// [1, K_max]. Each step advances the level by >= 1, so a site is visited at
// most once and the hitting probability is the sum of arrival probabilities.
// The transverse domain is a box of the given radius; any leakage beyond
// 1e-12 is an error that reports the radius actually needed.
HittingTable hitting_probabilities(const StepDistribution& sd, std::int64_t K_max,
                                   std::int64_t transverse_radius);

// Sum of hitting probabilities over the slab at level K (1 <= K <= K_max).
double slab_mass(const HittingTable& table, std::int64_t K);

}  // namespace rwre
