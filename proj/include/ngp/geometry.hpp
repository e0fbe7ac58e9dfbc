#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <utility>

#include "ngp/core.hpp"

namespace ngp {

/// Absolute tolerance used throughout for feasibility checks.
inline constexpr double kFeasibilityTol = 1e-12;

/// Contract for a closed convex feasible region: Euclidean projection plus a
/// membership test. BoxRegion is the only built-in model.
template <typename R>
concept ConvexRegion = requires(const R& r, const Vector& x, double tol) {
  { r.dim() } -> std::convertible_to<std::size_t>;
  { r.project(x) } -> std::convertible_to<Vector>;
  { r.contains(x, tol) } -> std::convertible_to<bool>;
};

/// Axis-aligned box { x : lower <= x <= upper }. Degenerate coordinates
/// (lower == upper) are allowed and project to the common value.
class BoxRegion {
public:
  BoxRegion(Vector lower, Vector upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty()) throw InvalidInput("BoxRegion: dimension must be >= 1");
    check_dim(lower_.size(), upper_.size(), "BoxRegion bounds");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!(lower_[i] <= upper_[i])) {
        throw InvalidInput("BoxRegion: lower[" + std::to_string(i) + "] > upper[" +
                           std::to_string(i) + "]");
      }
    }
  }

  std::size_t dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  Vector project(const Vector& x) const {
    check_dim(lower_.size(), x.size(), "BoxRegion::project");
    Vector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      z[i] = std::min(std::max(x[i], lower_[i]), upper_[i]);
    }
    return z;
  }

  bool contains(const Vector& x, double tol = kFeasibilityTol) const {
    check_dim(lower_.size(), x.size(), "BoxRegion::contains");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
    }
    return true;
  }

  Vector midpoint() const {
    Vector m(lower_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (lower_[i] + upper_[i]);
    return m;
  }

private:
  Vector lower_;
  Vector upper_;
};

static_assert(ConvexRegion<BoxRegion>);

template <ConvexRegion R>
Vector project(const R& region, const Vector& x) {
  return region.project(x);
}

/// The projected step from a base point: direction = P[x - alpha0 g] - x.
/// By construction base_point + direction is feasible.
struct SearchDirection {
  Vector direction;
  Vector base_point;
  double trial_scale = 1.0;
};

template <ConvexRegion R>
SearchDirection search_direction(const R& region, const Vector& x, const Vector& g,
                                 double alpha0) {
  if (!(alpha0 > 0.0)) throw InvalidConfig("search_direction: alpha0 must be > 0");
  check_dim(x.size(), g.size(), "search_direction");
  Vector target = add_scaled(x, -alpha0, g);
  Vector projected = region.project(target);
  return SearchDirection{subtract(projected, x), x, alpha0};
}

/// Stationarity measure -direction . g; zero exactly at first-order
/// stationary points and nonnegative (up to rounding) everywhere else.
inline double stationarity_measure(const SearchDirection& d, const Vector& g) {
  return -dot(d.direction, g);
}

}  // namespace ngp
