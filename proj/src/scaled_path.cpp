#include "rwre/scaled_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/errors.hpp"

namespace rwre {

ScaledPath ScaledPath::build(const WalkPath& path, std::int64_t n, std::span<const double> v) {
  if (n < 1) throw std::invalid_argument("ScaledPath: n must be >= 1");
  if (v.size() != static_cast<std::size_t>(path.dim()))
    throw std::invalid_argument("ScaledPath: speed dimension mismatch");
  ScaledPath sp;
  sp.n_ = n;
  sp.dim_ = path.dim();
  sp.v_.assign(v.begin(), v.end());
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  sp.knots_.resize(static_cast<std::size_t>((path.horizon() + 1) * sp.dim_));
  for (std::int64_t k = 0; k <= path.horizon(); ++k) {
    const Site& x = path.at(k);
    for (int i = 0; i < sp.dim_; ++i) {
      // n v (k/n) = v k exactly; the integer part uses the true floor.
      const double centered =
          static_cast<double>(x[i]) -
          std::floor(v[static_cast<std::size_t>(i)] * static_cast<double>(k));
      sp.knots_[static_cast<std::size_t>(k * sp.dim_ + i)] = centered * inv_sqrt_n;
    }
  }
  return sp;
}

double ScaledPath::value(double t, int coord) const {
  const double pos = t * static_cast<double>(n_);
  const std::int64_t last = knot_count() - 1;
  if (t < 0.0 || pos > static_cast<double>(last) + 1e-9)
    throw std::invalid_argument("ScaledPath: time outside the covered range");
  std::int64_t k = static_cast<std::int64_t>(std::floor(pos));
  if (k >= last) return knot(last, coord);
  const double frac = pos - static_cast<double>(k);
  return knot(k, coord) * (1.0 - frac) + knot(k + 1, coord) * frac;
}

double d_T(const ScaledPath& f, const ScaledPath& g, double T) {
  if (f.dim() != g.dim()) throw std::invalid_argument("d_T: dimension mismatch");
  if (T < 0.0 || T > f.max_time() + 1e-12 || T > g.max_time() + 1e-12)
    throw std::invalid_argument("d_T: paths do not cover [0, T]");
  // Knot-union grid: the sup of |f - g| over each linear piece is attained at
  // a grid point, so this evaluation is exact.
  std::vector<double> times;
  const auto add_knots = [&](const ScaledPath& p) {
    const double n = static_cast<double>(p.scale_n());
    const std::int64_t kmax =
        std::min<std::int64_t>(p.knot_count() - 1, static_cast<std::int64_t>(std::floor(T * n + 1e-9)));
    for (std::int64_t k = 0; k <= kmax; ++k) times.push_back(static_cast<double>(k) / n);
  };
  add_knots(f);
  add_knots(g);
  times.push_back(T);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  double sup = 0.0;
  for (double t : times) {
    for (int i = 0; i < f.dim(); ++i)
      sup = std::max(sup, std::abs(f.value(t, i) - g.value(t, i)));
    if (sup >= 1.0) return 1.0;
  }
  return std::min(sup, 1.0);
}

double FunctionalSpec::bound_value() const {
  switch (kind) {
    case Kind::ClippedCoordinate: return bound;
    case Kind::CappedSupNorm: return 1.0;
    case Kind::SmoothedIndicator: return 1.0;
  }
  return 1.0;
}

double FunctionalSpec::lipschitz_constant() const {
  switch (kind) {
    case Kind::ClippedCoordinate: return std::max(1.0, 2.0 * bound);
    case Kind::CappedSupNorm: return 1.0;
    case Kind::SmoothedIndicator: return std::max(1.0, 1.0 / width);
  }
  return 1.0;
}

FunctionalSpec FunctionalSpec::clipped_coordinate(double t0, int coordinate, double bound,
                                                  double T) {
  FunctionalSpec s;
  s.kind = Kind::ClippedCoordinate;
  s.t0 = t0;
  s.coordinate = coordinate;
  s.bound = bound;
  s.T = T;
  if (bound <= 0.0) throw config_error("functional: bound must be positive");
  if (t0 < 0.0 || t0 > T) throw config_error("functional: t0 must lie in [0, T]");
  return s;
}

FunctionalSpec FunctionalSpec::capped_supnorm(double T) {
  FunctionalSpec s;
  s.kind = Kind::CappedSupNorm;
  s.T = T;
  return s;
}

FunctionalSpec FunctionalSpec::smoothed_indicator(std::vector<double> center, double width,
                                                  double T) {
  FunctionalSpec s;
  s.kind = Kind::SmoothedIndicator;
  s.center = std::move(center);
  s.width = width;
  s.T = T;
  if (width <= 0.0) throw config_error("functional: width must be positive");
  return s;
}

FunctionalSpec FunctionalSpec::parse_kind(const std::string& name) {
  if (name == "clipped_coordinate") return clipped_coordinate(1.0, 0, 1.0);
  if (name == "capped_supnorm") return capped_supnorm();
  if (name == "smoothed_indicator") return smoothed_indicator({}, 1.0);
  throw config_error("functional: unknown kind '" + name + "'");
}

std::string FunctionalSpec::kind_name() const {
  switch (kind) {
    case Kind::ClippedCoordinate: return "clipped_coordinate";
    case Kind::CappedSupNorm: return "capped_supnorm";
    case Kind::SmoothedIndicator: return "smoothed_indicator";
  }
  return "?";
}

double evaluate_functional(const FunctionalSpec& spec, const ScaledPath& path) {
  switch (spec.kind) {
    case FunctionalSpec::Kind::ClippedCoordinate: {
      const double x = path.value(spec.t0, spec.coordinate);
      return std::clamp(x, -spec.bound, spec.bound);
    }
    case FunctionalSpec::Kind::CappedSupNorm: {
      // Sup over knots in [0, T] plus the endpoint; exact for the same reason
      // as d_T.
      double sup = 0.0;
      const double n = static_cast<double>(path.scale_n());
      const std::int64_t kmax = std::min<std::int64_t>(
          path.knot_count() - 1, static_cast<std::int64_t>(std::floor(spec.T * n + 1e-9)));
      for (std::int64_t k = 0; k <= kmax; ++k)
        for (int i = 0; i < path.dim(); ++i) sup = std::max(sup, std::abs(path.knot(k, i)));
      for (int i = 0; i < path.dim(); ++i)
        sup = std::max(sup, std::abs(path.value(spec.T, i)));
      return std::min(sup, 1.0);
    }
    case FunctionalSpec::Kind::SmoothedIndicator: {
      if (spec.center.size() != static_cast<std::size_t>(path.dim()))
        throw std::invalid_argument("smoothed_indicator: center dimension mismatch");
      double dist = 0.0;
      for (int i = 0; i < path.dim(); ++i)
        dist = std::max(dist, std::abs(path.value(spec.T, i) - spec.center[static_cast<std::size_t>(i)]));
      return std::max(0.0, 1.0 - dist / spec.width);
    }
  }
  throw std::logic_error("evaluate_functional: unreachable");
}

}  // namespace rwre
