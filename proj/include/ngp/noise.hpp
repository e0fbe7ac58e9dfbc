#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ngp/core.hpp"
#include "ngp/stochastic.hpp"

namespace ngp {

enum class NoiseMethod {
  pointwise_std,
  global_average,
  chebyshev,
  max_abs,
  range,
  difference_table,
};

inline const char* to_string(NoiseMethod m) {
  switch (m) {
    case NoiseMethod::pointwise_std: return "pointwise-std";
    case NoiseMethod::global_average: return "global-average";
    case NoiseMethod::chebyshev: return "chebyshev";
    case NoiseMethod::max_abs: return "max-abs";
    case NoiseMethod::range: return "range";
    case NoiseMethod::difference_table: return "difference-table";
  }
  return "?";
}

/// An estimated noise level or noise bound, in objective units.
struct NoiseEstimate {
  double value = 0.0;
  NoiseMethod method = NoiseMethod::pointwise_std;
  int sample_count = 0;
  std::optional<Vector> location;
};

/// Bessel-corrected sample standard deviation of repeated noisy evaluations
/// at one point; unbiased and consistent for the noise level there.
inline NoiseEstimate pointwise_noise_level(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw InsufficientSamples("pointwise_noise_level: need at least 2 samples");
  }
  const double m = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return NoiseEstimate{std::sqrt(ss / (m - 1.0)), NoiseMethod::pointwise_std,
                       static_cast<int>(samples.size()), std::nullopt};
}

/// Average of pointwise estimates taken at points spread over the region of
/// interest. Accepts pointwise-std or difference-table inputs.
inline NoiseEstimate global_noise_level(std::span<const NoiseEstimate> per_point) {
  if (per_point.empty()) {
    throw InsufficientSamples("global_noise_level: need at least one pointwise estimate");
  }
  double sum = 0.0;
  for (const NoiseEstimate& e : per_point) {
    if (e.method != NoiseMethod::pointwise_std && e.method != NoiseMethod::difference_table) {
      throw InvalidInput("global_noise_level: inputs must be pointwise estimates");
    }
    sum += e.value;
  }
  return NoiseEstimate{sum / static_cast<double>(per_point.size()),
                       NoiseMethod::global_average, static_cast<int>(per_point.size()),
                       std::nullopt};
}

/// Empirical Chebyshev bound mean(deltas) + lambda * std(deltas) on noise
/// samples delta_j = f_j - fhat. A high-probability bound when the noise has
/// finite variance.
inline NoiseEstimate chebyshev_bound(std::span<const double> deltas, int lambda = 3) {
  if (lambda < 1) throw InvalidConfig("chebyshev_bound: lambda must be an integer >= 1");
  if (deltas.size() < 2) throw InsufficientSamples("chebyshev_bound: need at least 2 samples");
  const double m = static_cast<double>(deltas.size());
  double mean = 0.0;
  for (double v : deltas) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : deltas) ss += (v - mean) * (v - mean);
  return NoiseEstimate{mean + lambda * std::sqrt(ss / (m - 1.0)), NoiseMethod::chebyshev,
                       static_cast<int>(deltas.size()), std::nullopt};
}

/// max |delta_j|; consistent for the noise bound when the noise is bounded.
inline NoiseEstimate max_abs_bound(std::span<const double> deltas) {
  if (deltas.empty()) throw InsufficientSamples("max_abs_bound: need at least 1 sample");
  double m = 0.0;
  for (double v : deltas) m = std::max(m, std::abs(v));
  return NoiseEstimate{m, NoiseMethod::max_abs, static_cast<int>(deltas.size()),
                       std::nullopt};
}

/// Range max f_j - min f_j of raw noisy objectives; needs no reference value.
/// For noise with nonzero mean this estimates the support width rather than
/// the noise bound itself.
inline NoiseEstimate range_bound(std::span<const double> values) {
  if (values.size() < 2) throw InsufficientSamples("range_bound: need at least 2 samples");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return NoiseEstimate{*hi - *lo, NoiseMethod::range, static_cast<int>(values.size()),
                       std::nullopt};
}

/// Scaled forward-difference table built along a line; column k holds the
/// k-th order differences and rms[k] the noise estimate it implies.
struct DifferenceTable {
  std::vector<std::vector<double>> columns;
  std::vector<double> scaled_rms;
};

class EstimationFailed : public Error {
public:
  EstimationFailed(const std::string& msg, DifferenceTable table)
      : Error(msg), table_(std::move(table)) {}
  const DifferenceTable& table() const { return table_; }

private:
  DifferenceTable table_;
};

namespace detail {

inline double difference_scale(int k) {
  // (k!)^2 / (2k)! == 1 / binomial(2k, k)
  double binom = 1.0;
  for (int i = 1; i <= k; ++i) binom *= static_cast<double>(k + i) / i;
  return 1.0 / binom;
}

}  // namespace detail

/// Noise level from function values on a line, in the style of difference-
/// table estimators for computational noise: k-th order differences of
/// smooth trends vanish while noise contributions stabilize. Works for
/// stochastic noise as well.
///
/// Picks the first order k whose estimate agrees with the next two orders
/// within a factor of 4 and returns the median of those three.
inline NoiseEstimate difference_table_noise(NoisyOracle& oracle, const Vector& x,
                                            const Vector& direction, double spacing,
                                            int points) {
  if (points < 6) throw InvalidConfig("difference_table_noise: need at least 6 points");
  if (!(spacing > 0.0)) throw InvalidConfig("difference_table_noise: spacing must be > 0");
  check_dim(x.size(), direction.size(), "difference_table_noise");

  std::vector<double> line(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    Vector xi = add_scaled(x, spacing * i, direction);
    line[static_cast<std::size_t>(i)] = oracle.evaluate(xi);
  }

  DifferenceTable table;
  const int max_order = points - 2;
  table.columns.reserve(static_cast<std::size_t>(max_order));
  table.scaled_rms.reserve(static_cast<std::size_t>(max_order));
  std::vector<double> column = line;
  for (int k = 1; k <= max_order; ++k) {
    std::vector<double> next(column.size() - 1);
    for (std::size_t i = 0; i + 1 < column.size(); ++i) next[i] = column[i + 1] - column[i];
    column = std::move(next);
    double ms = 0.0;
    for (double v : column) ms += v * v;
    ms /= static_cast<double>(column.size());
    table.columns.push_back(column);
    table.scaled_rms.push_back(std::sqrt(detail::difference_scale(k) * ms));
  }

  auto agree = [](double a, double b) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (hi == 0.0) return true;  // all zero: exact agreement
    return hi <= 4.0 * lo;
  };
  for (std::size_t k = 0; k + 2 < table.scaled_rms.size(); ++k) {
    const double a = table.scaled_rms[k];
    const double b = table.scaled_rms[k + 1];
    const double c = table.scaled_rms[k + 2];
    if (agree(a, b) && agree(b, c) && agree(a, c)) {
      std::array<double, 3> trio{a, b, c};
      std::sort(trio.begin(), trio.end());
      NoiseEstimate est{trio[1], NoiseMethod::difference_table, points, std::nullopt};
      est.location = x;
      return est;
    }
  }
  throw EstimationFailed("difference_table_noise: no stable difference order found",
                         std::move(table));
}

}  // namespace ngp
