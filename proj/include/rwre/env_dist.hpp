// Environment marginals Q: the law of one site's transition kernel. Three
// concrete uniformly elliptic families; the finite-support ones can be
// enumerated exactly by the oracle module.
#pragma once

#include <cstdint>
#include <vector>

#include "rwre/kernel.hpp"
#include "rwre/rng.hpp"

namespace rwre {

struct MixtureComponent {
  TransitionKernel kernel;
  double weight = 0.0;
};

class EnvDistribution {
 public:
  enum class Family { PointMass, FiniteMixture, PerturbedDrift };

  // Constructors validate against the ellipticity constant and throw
  // config_error on malformed parameters.
  static EnvDistribution point_mass(const TransitionKernel& kernel, double kappa);
  static EnvDistribution finite_mixture(std::vector<MixtureComponent> components, double kappa);
  // Multiplicative log-uniform tilt: probs proportional to base * exp(eps*(2u-1))
  // with one independent uniform per direction, then renormalized. Worst-case
  // entry is base_min * exp(-2 eps); eps must keep that above kappa.
  static EnvDistribution perturbed_drift(const TransitionKernel& base, double epsilon, double kappa);

  Family family() const { return family_; }
  double kappa() const { return kappa_; }
  int dim() const { return dim_; }
  bool finite_support() const { return family_ != Family::PerturbedDrift; }

  // Finite-support view (PointMass, FiniteMixture); throws otherwise.
  const std::vector<MixtureComponent>& support() const;

  const TransitionKernel& base_kernel() const { return base_; }
  double epsilon() const { return epsilon_; }

  // One draw from Q. Consumes a fixed number of words per family so that
  // site streams never interfere.
  TransitionKernel sample(RngStream& stream) const;

 private:
  EnvDistribution() = default;
  Family family_ = Family::PointMass;
  double kappa_ = 0.0;
  int dim_ = 0;
  std::vector<MixtureComponent> components_;  // PointMass keeps a single entry here too
  TransitionKernel base_;                     // PerturbedDrift
  double epsilon_ = 0.0;
};

}  // namespace rwre
