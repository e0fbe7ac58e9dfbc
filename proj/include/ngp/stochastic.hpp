#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ngp/core.hpp"
#include "ngp/geometry.hpp"
#include "ngp/rng.hpp"

namespace ngp {

/// One realization of the uncertain parameters entering a per-sample
/// objective. All built-in problems use at most three.
using Sample = std::array<double, 3>;

struct ValueGradient {
  double value = 0.0;
  Vector gradient;
};

/// Sample mean and Bessel-corrected variance of per-sample values, with the
/// corresponding gradients when per-sample gradients are available.
struct SampleStatistics {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<Vector> grad_mean;
  std::optional<Vector> grad_std;
};

/// Identifies a batch; the batch contents are re-materialized from the seed,
/// never stored.
struct BatchHandle {
  std::uint64_t seed = 0;
};

/// Black-box noisy objective. Evaluations draw a fresh batch unless a batch
/// is pinned, in which case repeated evaluation at the same point returns
/// bit-identical values. Every evaluation adds batch_size() to the effort
/// counter (the cost axis: batch size x number of function calls).
class NoisyOracle {
public:
  virtual ~NoisyOracle() = default;

  virtual double evaluate(const Vector& x) = 0;

  virtual bool has_analytic_gradient() const = 0;

  /// Gradient of the noisy objective on one batch (pinned batch if any).
  /// Throws UnsupportedOperation when no per-sample gradient exists.
  virtual Vector analytic_gradient(const Vector& x) = 0;

  /// Value and gradient computed on one shared batch (a single call).
  virtual ValueGradient evaluate_with_gradient(const Vector& x) = 0;

  virtual BatchHandle pin_batch(std::uint64_t seed) = 0;
  virtual void release_batch() = 0;
  virtual bool is_pinned() const = 0;

  /// Draws a new batch identity from the oracle's seed stream.
  virtual std::uint64_t fresh_batch_seed() = 0;

  virtual int batch_size() const = 0;
  virtual std::uint64_t effort() const = 0;
  virtual std::uint64_t call_count() const = 0;
};

/// Pins a derived batch for the lifetime of the guard unless the oracle is
/// already pinned, in which case the existing pin is kept untouched.
class ScopedPin {
public:
  ScopedPin(NoisyOracle& oracle, std::uint64_t seed) : oracle_(oracle) {
    if (!oracle_.is_pinned()) {
      oracle_.pin_batch(seed);
      owned_ = true;
    }
  }
  ~ScopedPin() {
    if (owned_) oracle_.release_batch();
  }
  ScopedPin(const ScopedPin&) = delete;
  ScopedPin& operator=(const ScopedPin&) = delete;

private:
  NoisyOracle& oracle_;
  bool owned_ = false;
};

/// Sample-average objective mean(s) + 3 * std(s) over a batch of i.i.d.
/// samples, with the analytic gradient of both terms.
class SampleAverageOracle final : public NoisyOracle {
public:
  using PerSampleFn = std::function<double(const Vector&, const Sample&)>;
  using PerSampleGrad = std::function<Vector(const Vector&, const Sample&)>;
  using Sampler = std::function<Sample(Rng&)>;

  SampleAverageOracle(PerSampleFn fn, Sampler sampler, int batch_size, std::uint64_t seed,
                      PerSampleGrad grad = nullptr)
      : fn_(std::move(fn)),
        grad_(std::move(grad)),
        sampler_(std::move(sampler)),
        batch_size_(batch_size),
        base_seed_(seed) {
    if (batch_size_ < 2) {
      throw InvalidConfig("SampleAverageOracle: batch size must be >= 2 (variance undefined)");
    }
  }

  double evaluate(const Vector& x) override {
    SampleStatistics st = statistics_on(current_batch_seed(), x, false);
    bump(1);
    return st.mean + 3.0 * std::sqrt(st.variance);
  }

  bool has_analytic_gradient() const override { return static_cast<bool>(grad_); }

  Vector analytic_gradient(const Vector& x) override {
    SampleStatistics st = statistics_with_grad(x);
    Vector g = *st.grad_mean;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 3.0 * (*st.grad_std)[i];
    return g;
  }

  ValueGradient evaluate_with_gradient(const Vector& x) override {
    SampleStatistics st = statistics_with_grad(x);
    ValueGradient vg;
    vg.value = st.mean + 3.0 * std::sqrt(st.variance);
    vg.gradient = *st.grad_mean;
    for (std::size_t i = 0; i < vg.gradient.size(); ++i) {
      vg.gradient[i] += 3.0 * (*st.grad_std)[i];
    }
    return vg;
  }

  BatchHandle pin_batch(std::uint64_t seed) override {
    pinned_ = BatchHandle{seed};
    return *pinned_;
  }
  void release_batch() override { pinned_.reset(); }
  bool is_pinned() const override { return pinned_.has_value(); }

  std::uint64_t fresh_batch_seed() override {
    return derive_seed(base_seed_, draw_counter_++);
  }

  int batch_size() const override { return batch_size_; }
  std::uint64_t effort() const override { return effort_; }
  std::uint64_t call_count() const override { return calls_; }

  /// Batch identity of the draw_counter-th unpinned draw; lets callers
  /// re-materialize any historical batch.
  std::uint64_t historical_batch_seed(std::uint64_t counter) const {
    return derive_seed(base_seed_, counter);
  }

  /// Statistics on the batch identified by `handle` (no effort accounting;
  /// analysis aid).
  SampleStatistics statistics(const BatchHandle& handle, const Vector& x,
                              bool with_gradient) const {
    return statistics_on(handle.seed, x, with_gradient);
  }

private:
  std::uint64_t current_batch_seed() {
    return pinned_ ? pinned_->seed : fresh_batch_seed();
  }

  SampleStatistics statistics_with_grad(const Vector& x) {
    if (!grad_) {
      throw UnsupportedOperation("SampleAverageOracle: no per-sample gradient provided");
    }
    SampleStatistics st = statistics_on(current_batch_seed(), x, true);
    bump(1);
    return st;
  }

  void bump(std::uint64_t calls) {
    calls_ += calls;
    effort_ += calls * static_cast<std::uint64_t>(batch_size_);
  }

  SampleStatistics statistics_on(std::uint64_t batch_seed, const Vector& x,
                                 bool with_gradient) const {
    Rng rng(batch_seed);
    const int n = batch_size_;
    std::vector<Sample> batch(static_cast<std::size_t>(n));
    for (auto& s : batch) s = sampler_(rng);

    std::vector<double> values(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) values[i] = fn_(x, batch[i]);

    SampleStatistics st;
    bool all_equal = true;
    for (double v : values) {
      if (v != values.front()) {
        all_equal = false;
        break;
      }
    }
    if (all_equal) {
      st.mean = values.front();
      st.variance = 0.0;
    } else {
      double sum = 0.0;
      for (double v : values) sum += v;
      st.mean = sum / n;
      double ss = 0.0;
      for (double v : values) ss += (v - st.mean) * (v - st.mean);
      st.variance = ss / (n - 1);
    }

    if (!with_gradient) return st;

    std::vector<Vector> grads(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) grads[i] = grad_(x, batch[i]);
    const std::size_t d = grads.front().size();
    Vector gmean(d, 0.0);
    for (const Vector& g : grads) {
      check_dim(d, g.size(), "per-sample gradient");
      for (std::size_t j = 0; j < d; ++j) gmean[j] += g[j];
    }
    for (std::size_t j = 0; j < d; ++j) gmean[j] /= n;

    Vector gstd(d, 0.0);
    if (st.variance > 0.0) {
      const double sd = std::sqrt(st.variance);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const double w = (values[i] - st.mean) / ((n - 1) * sd);
        for (std::size_t j = 0; j < d; ++j) gstd[j] += w * (grads[i][j] - gmean[j]);
      }
    }
    // variance == 0: the std term is kinked; take the zero subgradient.

    st.grad_mean = std::move(gmean);
    st.grad_std = std::move(gstd);
    return st;
  }

  PerSampleFn fn_;
  PerSampleGrad grad_;
  Sampler sampler_;
  int batch_size_;
  std::uint64_t base_seed_;
  std::uint64_t draw_counter_ = 0;
  std::uint64_t effort_ = 0;
  std::uint64_t calls_ = 0;
  std::optional<BatchHandle> pinned_;
};

enum class NoiseKind { none, uniform, gaussian };

/// Smooth objective plus injected additive noise f(x) + delta. Three regimes:
///  - stochastic, unpinned: fresh draw per call;
///  - stochastic, pinned: delta depends only on (pin seed, x), so repeated
///    evaluation at one point is bit-identical;
///  - deterministic: delta depends only on (seed, x) regardless of pinning,
///    emulating computational noise.
/// Uniform noise is amplitude * U[-1, 1] (bounded by the amplitude);
/// gaussian noise has standard deviation equal to the amplitude.
class AdditiveNoiseOracle final : public NoisyOracle {
public:
  AdditiveNoiseOracle(std::function<double(const Vector&)> f,
                      std::function<Vector(const Vector&)> grad, NoiseKind kind,
                      double amplitude, std::uint64_t seed, bool deterministic = false)
      : f_(std::move(f)),
        grad_(std::move(grad)),
        kind_(kind),
        amplitude_(amplitude),
        base_seed_(seed),
        deterministic_(deterministic) {
    if (amplitude_ < 0.0) throw InvalidConfig("AdditiveNoiseOracle: amplitude must be >= 0");
  }

  double evaluate(const Vector& x) override {
    const double v = f_(x) + draw_noise(x);
    bump(1);
    return v;
  }

  bool has_analytic_gradient() const override { return static_cast<bool>(grad_); }

  Vector analytic_gradient(const Vector& x) override {
    if (!grad_) throw UnsupportedOperation("AdditiveNoiseOracle: no gradient provided");
    bump(1);
    return grad_(x);
  }

  ValueGradient evaluate_with_gradient(const Vector& x) override {
    if (!grad_) throw UnsupportedOperation("AdditiveNoiseOracle: no gradient provided");
    ValueGradient vg{f_(x) + draw_noise(x), grad_(x)};
    bump(1);
    return vg;
  }

  BatchHandle pin_batch(std::uint64_t seed) override {
    pinned_ = BatchHandle{seed};
    return *pinned_;
  }
  void release_batch() override { pinned_.reset(); }
  bool is_pinned() const override { return pinned_.has_value(); }

  std::uint64_t fresh_batch_seed() override {
    return derive_seed(base_seed_, draw_counter_++);
  }

  int batch_size() const override { return 1; }
  std::uint64_t effort() const override { return effort_; }
  std::uint64_t call_count() const override { return calls_; }

private:
  void bump(std::uint64_t calls) {
    calls_ += calls;
    effort_ += calls;
  }

  double draw_noise(const Vector& x) {
    if (kind_ == NoiseKind::none || amplitude_ == 0.0) return 0.0;
    std::uint64_t h;
    if (deterministic_) {
      h = hash_point(base_seed_, x);
    } else if (pinned_) {
      h = hash_point(pinned_->seed, x);
    } else {
      h = fresh_batch_seed();
    }
    if (kind_ == NoiseKind::uniform) return amplitude_ * hash_to_symmetric_uniform(h);
    // gaussian via Box-Muller on two hash-derived uniforms
    std::uint64_t state = h;
    double u1 = static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
    double u2 = static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return amplitude_ * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::function<double(const Vector&)> f_;
  std::function<Vector(const Vector&)> grad_;
  NoiseKind kind_;
  double amplitude_;
  std::uint64_t base_seed_;
  bool deterministic_;
  std::uint64_t draw_counter_ = 0;
  std::uint64_t effort_ = 0;
  std::uint64_t calls_ = 0;
  std::optional<BatchHandle> pinned_;
};

/// Noise-free description of a problem whose smooth counterpart is known in
/// closed form; consumed by the diagnostics layer.
struct ExactProblem {
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;
  std::optional<Vector> minimizer;  // unconstrained minimizer, when meaningful
};

/// Diagonal strongly convex quadratic 0.5 * sum q_j (x_j - t_j)^2 on [0,1]^d.
/// Curvatures span [1, 4]; several targets sit outside the box so the
/// constrained minimizer clamp(t) has active bounds.
struct QuadraticModel {
  Vector curvature;
  Vector target;

  explicit QuadraticModel(int dimension) {
    if (dimension < 1) throw InvalidConfig("QuadraticModel: dimension must be >= 1");
    curvature.resize(static_cast<std::size_t>(dimension));
    target.resize(static_cast<std::size_t>(dimension));
    for (int j = 0; j < dimension; ++j) {
      curvature[j] = dimension == 1 ? 2.0 : 1.0 + 3.0 * j / (dimension - 1);
      target[j] = 0.5 + 1.1 * std::sin(1.7 * (j + 1));
    }
  }

  double value(const Vector& x) const {
    check_dim(curvature.size(), x.size(), "QuadraticModel::value");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      s += 0.5 * curvature[j] * (x[j] - target[j]) * (x[j] - target[j]);
    }
    return s;
  }

  Vector gradient(const Vector& x) const {
    check_dim(curvature.size(), x.size(), "QuadraticModel::gradient");
    Vector g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = curvature[j] * (x[j] - target[j]);
    return g;
  }

  double lipschitz() const {
    double m = 0.0;
    for (double q : curvature) m = std::max(m, q);
    return m;
  }

  BoxRegion region() const {
    return BoxRegion(Vector(curvature.size(), 0.0), Vector(curvature.size(), 1.0));
  }

  Vector constrained_minimizer() const { return region().project(target); }
};

struct SurrogateSpec {
  std::string family;  // horn-surrogate | quadratic | quadratic-additive | quadratic-computational
  int batch_size = 100;
  std::uint64_t seed = 0;
  double noise_amplitude = 0.0;  // per-sample std (quadratic) or bound (additive kinds)
  int dimension = 6;
};

struct SurrogateProblem {
  std::unique_ptr<NoisyOracle> oracle;
  BoxRegion region;
  std::optional<ExactProblem> exact;
};

namespace detail {

// Horn-style surrogate response: nonconvex and smooth in the design b, with
// the three uncertain parameters (wave number, two wall impedances) entering
// the phase and the impedance terms.
inline constexpr double kHornA = 0.25;
inline constexpr double kHornB = 0.20;
inline constexpr double kHornC = 0.15;
inline constexpr double kHornSmoothing = 1e-6;

inline double horn_phase(std::size_t j) { return 0.4 + 0.7 * static_cast<double>(j); }

inline double horn_response(const Vector& b, const Sample& xi) {
  const double khat = xi[0];
  const double zl = (xi[1] - 50.0) / 50.0;
  const double zu = (xi[2] - 50.0) / 50.0;
  const std::size_t n = b.size();
  double osc = 0.0;
  for (std::size_t j = 0; j < n; ++j) osc += std::sin(khat * b[j] + horn_phase(j));
  double coupling = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) coupling += std::cos(0.5 * b[j] * b[j + 1]);
  double m = 0.0;
  for (double v : b) m += v;
  m /= static_cast<double>(n);
  const double impedance = zl * std::cos(0.6 * m) + zu * std::sin(0.8 * m);
  return 1.0 + kHornA / 6.0 * osc + kHornB / 5.0 * coupling + kHornC * impedance;
}

inline Vector horn_response_gradient(const Vector& b, const Sample& xi) {
  const double khat = xi[0];
  const double zl = (xi[1] - 50.0) / 50.0;
  const double zu = (xi[2] - 50.0) / 50.0;
  const std::size_t n = b.size();
  double m = 0.0;
  for (double v : b) m += v;
  m /= static_cast<double>(n);
  const double dimp_dm = -0.6 * zl * std::sin(0.6 * m) + 0.8 * zu * std::cos(0.8 * m);
  Vector g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = kHornA / 6.0 * khat * std::cos(khat * b[i] + horn_phase(i));
    if (i + 1 < n) g[i] += kHornB / 5.0 * (-0.5 * b[i + 1]) * std::sin(0.5 * b[i] * b[i + 1]);
    if (i >= 1) g[i] += kHornB / 5.0 * (-0.5 * b[i - 1]) * std::sin(0.5 * b[i - 1] * b[i]);
    g[i] += kHornC * dimp_dm / static_cast<double>(n);
  }
  return g;
}

inline double horn_per_sample(const Vector& b, const Sample& xi) {
  const double r = horn_response(b, xi) - 1.0;
  return std::sqrt(r * r + kHornSmoothing * kHornSmoothing);
}

inline Vector horn_per_sample_gradient(const Vector& b, const Sample& xi) {
  const double r = horn_response(b, xi) - 1.0;
  const double s = std::sqrt(r * r + kHornSmoothing * kHornSmoothing);
  Vector g = horn_response_gradient(b, xi);
  for (double& v : g) v *= r / s;
  return g;
}

inline Sample horn_sampler(Rng& rng) {
  Sample xi;
  xi[0] = rng.uniform(1.3, 1.5);  // wave number
  xi[1] = rng.normal(50.0, 3.0);  // lower wall impedance
  xi[2] = rng.normal(50.0, 3.0);  // upper wall impedance
  return xi;
}

}  // namespace detail

inline SurrogateProblem make_surrogate_problem(const SurrogateSpec& spec) {
  if (spec.family == "horn-surrogate") {
    BoxRegion region(Vector(6, 0.5), Vector(6, 3.0));
    auto oracle = std::make_unique<SampleAverageOracle>(
        detail::horn_per_sample, detail::horn_sampler, spec.batch_size, spec.seed,
        detail::horn_per_sample_gradient);
    return SurrogateProblem{std::move(oracle), std::move(region), std::nullopt};
  }

  if (spec.family == "quadratic" || spec.family == "quadratic-additive" ||
      spec.family == "quadratic-computational") {
    QuadraticModel model(spec.dimension);
    BoxRegion region = model.region();
    auto value = [model](const Vector& x) { return model.value(x); };
    auto grad = [model](const Vector& x) { return model.gradient(x); };

    if (spec.family == "quadratic") {
      const double amp = spec.noise_amplitude;
      auto per_sample = [model, amp](const Vector& x, const Sample& xi) {
        return model.value(x) + amp * xi[0];
      };
      auto per_sample_grad = [model](const Vector& x, const Sample&) {
        return model.gradient(x);
      };
      auto sampler = [](Rng& rng) { return Sample{rng.normal(), 0.0, 0.0}; };
      auto oracle = std::make_unique<SampleAverageOracle>(
          per_sample, sampler, spec.batch_size, spec.seed, per_sample_grad);
      // smooth counterpart of mean + 3 std: value shifted by 3 * amplitude
      ExactProblem exact{[model, amp](const Vector& x) { return model.value(x) + 3.0 * amp; },
                         grad, model.lipschitz(), model.constrained_minimizer()};
      return SurrogateProblem{std::move(oracle), std::move(region), std::move(exact)};
    }

    const bool computational = spec.family == "quadratic-computational";
    auto oracle = std::make_unique<AdditiveNoiseOracle>(
        value, grad, spec.noise_amplitude == 0.0 ? NoiseKind::none : NoiseKind::uniform,
        spec.noise_amplitude, spec.seed, computational);
    ExactProblem exact{value, grad, model.lipschitz(), model.constrained_minimizer()};
    return SurrogateProblem{std::move(oracle), std::move(region), std::move(exact)};
  }

  throw InvalidConfig("make_surrogate_problem: unknown family '" + spec.family + "'");
}

}  // namespace ngp
