// Nearest-neighbor transition kernels over the 2d exit directions of Z^d.
// Direction index convention: 2*axis is +e_{axis+1}, 2*axis+1 is -e_{axis+1}.
#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "rwre/site.hpp"

namespace rwre {

inline constexpr double kProbSumTol = 1e-12;

struct TransitionKernel {
  std::array<double, 2 * kMaxDim> p{};
  int dim = 0;

  int directions() const { return 2 * dim; }
  double prob(int dir) const { return p[static_cast<std::size_t>(dir)]; }

  static TransitionKernel from(std::span<const double> probs);
  static TransitionKernel uniform(int d);

  double sum() const;
  double min_prob() const;

  // Mean displacement (the kernel's drift vector).
  std::array<double, kMaxDim> drift() const;

  bool operator==(const TransitionKernel& o) const;  // bitwise on the live entries
  bool operator!=(const TransitionKernel& o) const { return !(*this == o); }
};

inline int dir_axis(int dir) { return dir / 2; }
inline std::int32_t dir_sign(int dir) { return (dir % 2 == 0) ? 1 : -1; }

inline Site step_to(const Site& s, int dir) { return s.offset(dir_axis(dir), dir_sign(dir)); }

// True iff the entries sum to 1 within 1e-12 and every entry is >= kappa.
bool validate_ellipticity(const TransitionKernel& kernel, double kappa);

// Maps a uniform draw in [0,1) to a direction index by CDF scan.
int sample_direction(const TransitionKernel& kernel, double u);

}  // namespace rwre
