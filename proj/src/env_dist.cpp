#include "rwre/env_dist.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

void require_kernel(const TransitionKernel& k, double kappa, const char* what) {
  if (!validate_ellipticity(k, kappa))
    throw config_error(std::string(what) + ": kernel violates ellipticity (sum within 1e-12 and min >= kappa)");
}

void require_kappa(double kappa, int dim) {
  if (dim < 1 || dim > kMaxDim) throw config_error("EnvDistribution: dimension out of range");
  if (!(kappa > 0.0) || kappa > 1.0 / (2.0 * dim))
    throw config_error("EnvDistribution: kappa must lie in (0, 1/(2d)]");
}

}  // namespace

EnvDistribution EnvDistribution::point_mass(const TransitionKernel& kernel, double kappa) {
  require_kappa(kappa, kernel.dim);
  require_kernel(kernel, kappa, "point_mass");
  EnvDistribution d;
  d.family_ = Family::PointMass;
  d.kappa_ = kappa;
  d.dim_ = kernel.dim;
  d.components_ = {MixtureComponent{kernel, 1.0}};
  return d;
}

EnvDistribution EnvDistribution::finite_mixture(std::vector<MixtureComponent> components,
                                                double kappa) {
  if (components.empty()) throw config_error("finite_mixture: support size must be >= 1");
  require_kappa(kappa, components.front().kernel.dim);
  double wsum = 0.0;
  for (const auto& c : components) {
    if (c.kernel.dim != components.front().kernel.dim)
      throw config_error("finite_mixture: mixed kernel dimensions");
    if (c.weight < 0.0) throw config_error("finite_mixture: negative weight");
    require_kernel(c.kernel, kappa, "finite_mixture");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) >= kProbSumTol)
    throw config_error("finite_mixture: weights must sum to 1 within 1e-12");
  EnvDistribution d;
  d.family_ = Family::FiniteMixture;
  d.kappa_ = kappa;
  d.dim_ = components.front().kernel.dim;
  d.components_ = std::move(components);
  return d;
}

EnvDistribution EnvDistribution::perturbed_drift(const TransitionKernel& base, double epsilon,
                                                 double kappa) {
  require_kappa(kappa, base.dim);
  require_kernel(base, kappa, "perturbed_drift base");
  if (epsilon < 0.0) throw config_error("perturbed_drift: negative perturbation amplitude");
  // Worst case over tilt draws: every other direction up-weighted, this one
  // down-weighted, giving base_e * exp(-2 eps) after renormalization.
  if (base.min_prob() * std::exp(-2.0 * epsilon) < kappa)
    throw config_error("perturbed_drift: epsilon too large to preserve ellipticity at kappa=" +
                       std::to_string(kappa));
  EnvDistribution d;
  d.family_ = Family::PerturbedDrift;
  d.kappa_ = kappa;
  d.dim_ = base.dim;
  d.base_ = base;
  d.epsilon_ = epsilon;
  return d;
}

const std::vector<MixtureComponent>& EnvDistribution::support() const {
  if (!finite_support())
    throw config_error("EnvDistribution: support() requires a finite-support family");
  return components_;
}

TransitionKernel EnvDistribution::sample(RngStream& stream) const {
  TransitionKernel out;
  switch (family_) {
    case Family::PointMass:
      out = components_.front().kernel;
      break;
    case Family::FiniteMixture: {
      const double u = stream.next_unit();
      double acc = 0.0;
      out = components_.back().kernel;
      for (const auto& c : components_) {
        acc += c.weight;
        if (u < acc) {
          out = c.kernel;
          break;
        }
      }
      break;
    }
    case Family::PerturbedDrift: {
      out.dim = base_.dim;
      double total = 0.0;
      for (int i = 0; i < base_.directions(); ++i) {
        const double u = stream.next_unit();
        const double w =
            base_.p[static_cast<std::size_t>(i)] * std::exp(epsilon_ * (2.0 * u - 1.0));
        out.p[static_cast<std::size_t>(i)] = w;
        total += w;
      }
      for (int i = 0; i < out.directions(); ++i) out.p[static_cast<std::size_t>(i)] /= total;
      break;
    }
  }
  assert(validate_ellipticity(out, kappa_));
  return out;
}

}  // namespace rwre
