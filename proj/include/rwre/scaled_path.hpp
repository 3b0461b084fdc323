// Diffusively rescaled paths: knot k holds (X(k) - floor(n v k/n)) / sqrt(n),
// with componentwise true floor, and values between knots by linear
// interpolation. Also the capped sup distance d_T and the bounded-Lipschitz
// test functionals evaluated on scaled paths.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwre/path.hpp"

namespace rwre {

class ScaledPath {
 public:
  // Builds knots for k = 0..path.horizon(); usable on [0, horizon/n].
  static ScaledPath build(const WalkPath& path, std::int64_t n, std::span<const double> v);

  std::int64_t scale_n() const { return n_; }
  int dim() const { return dim_; }
  std::int64_t knot_count() const { return static_cast<std::int64_t>(knots_.size()) / dim_; }
  double max_time() const { return static_cast<double>(knot_count() - 1) / static_cast<double>(n_); }
  const std::vector<double>& speed_used() const { return v_; }

  double knot(std::int64_t k, int coord) const {
    return knots_[static_cast<std::size_t>(k * dim_ + coord)];
  }

  // Linear interpolation; t must lie in [0, max_time()].
  double value(double t, int coord) const;

 private:
  std::int64_t n_ = 1;
  int dim_ = 0;
  std::vector<double> v_;
  std::vector<double> knots_;  // row-major, knot-major
};

// sup_{t <= T} |f(t) - g(t)|_inf capped at 1, evaluated exactly on the union
// of the two knot grids (the sup of a piecewise-linear norm lives at knots).
double d_T(const ScaledPath& f, const ScaledPath& g, double T);

// Bounded Lipschitz functionals on C([0,T], R^d). The declared bound/Lipschitz
// pair is honest with respect to the capped metric d_T: the clamp family pays
// a factor 2*bound when the cap is active.
struct FunctionalSpec {
  enum class Kind { ClippedCoordinate, CappedSupNorm, SmoothedIndicator };
  Kind kind = Kind::CappedSupNorm;
  double T = 1.0;

  // ClippedCoordinate: clamp(f_i(t0), -bound, bound)
  double t0 = 1.0;
  int coordinate = 0;
  double bound = 1.0;

  // SmoothedIndicator: max(0, 1 - |f(T) - center|_inf / width)
  std::vector<double> center;
  double width = 1.0;

  double bound_value() const;
  double lipschitz_constant() const;

  static FunctionalSpec clipped_coordinate(double t0, int coordinate, double bound,
                                           double T = 1.0);
  static FunctionalSpec capped_supnorm(double T = 1.0);
  static FunctionalSpec smoothed_indicator(std::vector<double> center, double width,
                                           double T = 1.0);
  static FunctionalSpec parse_kind(const std::string& name);  // maps config names to kinds

  std::string kind_name() const;
};

double evaluate_functional(const FunctionalSpec& spec, const ScaledPath& path);

}  // namespace rwre
