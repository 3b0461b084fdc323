#include "rwre/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rwre {

TransitionKernel TransitionKernel::from(std::span<const double> probs) {
  if (probs.size() % 2 != 0 || probs.empty() || probs.size() > 2 * kMaxDim)
    throw std::invalid_argument("TransitionKernel: need 2d probabilities with d in [1, " +
                                std::to_string(kMaxDim) + "]");
  TransitionKernel k;
  k.dim = static_cast<int>(probs.size() / 2);
  for (std::size_t i = 0; i < probs.size(); ++i) k.p[i] = probs[i];
  return k;
}

TransitionKernel TransitionKernel::uniform(int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("TransitionKernel: bad dimension");
  TransitionKernel k;
  k.dim = d;
  for (int i = 0; i < 2 * d; ++i) k.p[static_cast<std::size_t>(i)] = 1.0 / (2.0 * d);
  return k;
}

double TransitionKernel::sum() const {
  double s = 0.0;
  for (int i = 0; i < directions(); ++i) s += p[static_cast<std::size_t>(i)];
  return s;
}

double TransitionKernel::min_prob() const {
  double m = p[0];
  for (int i = 1; i < directions(); ++i) m = std::min(m, p[static_cast<std::size_t>(i)]);
  return m;
}

std::array<double, kMaxDim> TransitionKernel::drift() const {
  std::array<double, kMaxDim> v{};
  for (int a = 0; a < dim; ++a)
    v[static_cast<std::size_t>(a)] =
        p[static_cast<std::size_t>(2 * a)] - p[static_cast<std::size_t>(2 * a + 1)];
  return v;
}

bool TransitionKernel::operator==(const TransitionKernel& o) const {
  if (dim != o.dim) return false;
  for (int i = 0; i < directions(); ++i)
    if (p[static_cast<std::size_t>(i)] != o.p[static_cast<std::size_t>(i)]) return false;
  return true;
}

bool validate_ellipticity(const TransitionKernel& kernel, double kappa) {
  if (kernel.dim < 1) return false;
  if (std::abs(kernel.sum() - 1.0) >= kProbSumTol) return false;
  return kernel.min_prob() >= kappa;
}

int sample_direction(const TransitionKernel& kernel, double u) {
  double acc = 0.0;
  const int n = kernel.directions();
  for (int i = 0; i + 1 < n; ++i) {
    acc += kernel.p[static_cast<std::size_t>(i)];
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace rwre
