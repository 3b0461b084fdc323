// Recorded nearest-neighbor trajectories. Kept separate from the walk engine
// so that deterministic paths (coupling lambdas, oracle inputs) share the type.
#pragma once

#include <cstdint>
#include <vector>

#include "rwre/site.hpp"

namespace rwre {

struct WalkPath {
  Site start;
  std::vector<Site> positions;  // positions[t], t = 0..horizon
  std::uint64_t walk_seed = 0;

  std::int64_t horizon() const { return static_cast<std::int64_t>(positions.size()) - 1; }
  int dim() const { return start.dim; }
  const Site& at(std::int64_t t) const { return positions[static_cast<std::size_t>(t)]; }

  // positions[0] == start and consecutive sites differ by one unit step.
  bool valid() const {
    if (positions.empty() || positions.front() != start) return false;
    for (std::size_t t = 1; t < positions.size(); ++t) {
      if (positions[t].dim != start.dim) return false;
      if (l1_dist(positions[t - 1], positions[t]) != 1) return false;
    }
    return true;
  }

  // Builds a deterministic path from a start and a direction-index sequence.
  static WalkPath from_steps(const Site& start, const std::vector<int>& dirs);
};

}  // namespace rwre
