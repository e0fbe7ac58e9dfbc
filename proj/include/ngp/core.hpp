#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ngp {

using Vector = std::vector<double>;

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed data passed to an operation (e.g. dimension mismatch).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// A configuration value outside its admissible range.
class InvalidConfig : public Error {
public:
  using Error::Error;
};

/// Too few samples to evaluate an estimator.
class InsufficientSamples : public Error {
public:
  using Error::Error;
};

/// Requested a capability the object was not built with.
class UnsupportedOperation : public Error {
public:
  using Error::Error;
};

inline void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InvalidInput(std::string(what) + ": dimension mismatch, expected " +
                       std::to_string(expected) + ", got " + std::to_string(got));
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  check_dim(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline Vector add_scaled(std::span<const double> x, double alpha, std::span<const double> p) {
  check_dim(x.size(), p.size(), "add_scaled");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * p[i];
  return out;
}

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  check_dim(a.size(), b.size(), "subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace ngp
