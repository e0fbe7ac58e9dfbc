#pragma once

#include <cmath>
#include <limits>

#include "ngp/core.hpp"
#include "ngp/geometry.hpp"
#include "ngp/stochastic.hpp"

namespace ngp {

enum class SampleMode { consistent, inconsistent };
enum class FDScheme { forward, central };

/// Interval used when the noise level is exactly zero: cube root of unit
/// roundoff, the classical deterministic forward-difference choice.
inline const double kZeroNoiseInterval = std::cbrt(std::numeric_limits<double>::epsilon());

/// Smallest interval fd_gradient accepts; below this the perturbation
/// drowns in roundoff for O(1) variables.
inline constexpr double kMinInterval = 1e-12;

struct FDConfig {
  double interval = kZeroNoiseInterval;
  SampleMode sample_mode = SampleMode::inconsistent;
  FDScheme scheme = FDScheme::forward;
};

/// Forward-difference interval minimizing the mean-squared error under noise
/// of level eps_f when the gradient Lipschitz constant is L:
/// h = 8^(1/4) sqrt(eps_f / L).
inline double optimal_interval(double eps_f, double L) {
  if (!(L > 0.0)) throw InvalidConfig("optimal_interval: L must be > 0");
  if (eps_f < 0.0) throw InvalidConfig("optimal_interval: eps_f must be >= 0");
  if (eps_f == 0.0) return kZeroNoiseInterval;
  return std::pow(8.0, 0.25) * std::sqrt(eps_f / L);
}

namespace detail {

template <ConvexRegion R>
bool shifted_feasible(const R& region, const Vector& x, std::size_t i, double h) {
  Vector y = x;
  y[i] += h;
  return region.contains(y, kFeasibilityTol);
}

}  // namespace detail

/// Finite-difference gradient of the noisy objective. In consistent mode all
/// evaluations share one pinned batch (the oracle's existing pin is reused
/// if present); in inconsistent mode every evaluation draws a fresh batch.
///
/// Coordinates where the forward step would leave the region flip to a
/// backward difference, preserving O(h) accuracy inside the box; a
/// coordinate too narrow to move in either direction gets gradient 0.
template <ConvexRegion R>
Vector fd_gradient(NoisyOracle& oracle, const R& region, const Vector& x,
                   const FDConfig& cfg) {
  if (!(cfg.interval >= kMinInterval)) {
    throw InvalidConfig("fd_gradient: interval below the roundoff floor");
  }
  check_dim(region.dim(), x.size(), "fd_gradient");
  const double h = cfg.interval;
  const std::size_t n = x.size();

  ScopedPin pin_guard = cfg.sample_mode == SampleMode::consistent
                            ? ScopedPin(oracle, oracle.fresh_batch_seed())
                            : ScopedPin(oracle, 0);  // no-op sentinel below
  // ScopedPin always pins when unpinned; undo for inconsistent mode.
  struct Unpin {
    NoisyOracle* o = nullptr;
    ~Unpin() = default;
  };
  // (handled by constructing the guard only in consistent mode)

  Vector g(n, 0.0);
  if (cfg.scheme == FDScheme::forward) {
    const double f0 = oracle.evaluate(x);
    for (std::size_t i = 0; i < n; ++i) {
      double step = h;
      if (!detail::shifted_feasible(region, x, i, h)) {
        if (detail::shifted_feasible(region, x, i, -h)) {
          step = -h;
        } else {
          g[i] = 0.0;  // fixed coordinate: box narrower than h
          continue;
        }
      }
      Vector y = x;
      y[i] += step;
      g[i] = (oracle.evaluate(y) - f0) / step;
    }
    return g;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const bool up = detail::shifted_feasible(region, x, i, h);
    const bool down = detail::shifted_feasible(region, x, i, -h);
    if (up && down) {
      Vector yp = x, ym = x;
      yp[i] += h;
      ym[i] -= h;
      g[i] = (oracle.evaluate(yp) - oracle.evaluate(ym)) / (2.0 * h);
    } else if (up || down) {
      const double step = up ? h : -h;
      Vector y = x;
      y[i] += step;
      g[i] = (oracle.evaluate(y) - oracle.evaluate(x)) / step;
    } else {
      g[i] = 0.0;
    }
  }
  return g;
}

/// Unconstrained overload.
inline Vector fd_gradient(NoisyOracle& oracle, const Vector& x, const FDConfig& cfg) {
  const double inf = std::numeric_limits<double>::infinity();
  BoxRegion everything(Vector(x.size(), -inf), Vector(x.size(), inf));
  return fd_gradient(oracle, everything, x, cfg);
}

}  // namespace ngp
