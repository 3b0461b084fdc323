#pragma once

#include <cstdint>
#include <vector>

namespace rwre {

// Weighted log-log regression output for tail-exponent checks.
struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  std::int64_t points_used = 0;
  std::vector<std::int64_t> excluded_points;  // indices dropped (non-positive values)
};

}  // namespace rwre
