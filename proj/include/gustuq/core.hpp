#pragma once

// Shared domain types for the uncertainty-quantification methods: the input
// space of independent uniforms, QoI records, risk measures, sampling plans
// and the oracle interface every estimator consumes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gustuq/errors.hpp"
#include "gustuq/random.hpp"

namespace gustuq {

/// Row-major n×d point set; each row is one point, so a row is a contiguous span.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const PointSet& points, Eigen::Index i) {
  return {points.row(i).data(), static_cast<std::size_t>(points.cols())};
}

struct UncertainInput {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
};

/// Ordered list of mutually independent uniform inputs.
class InputSpace {
 public:
  InputSpace() = default;

  explicit InputSpace(std::vector<UncertainInput> inputs) : inputs_(std::move(inputs)) {
    if (inputs_.empty()) throw ArgumentError("InputSpace needs at least one input");
    std::unordered_set<std::string> names;
    for (const auto& in : inputs_) {
      if (!(in.lower < in.upper))
        throw ArgumentError("input '" + in.name + "' must satisfy lower < upper");
      if (!names.insert(in.name).second) throw ArgumentError("duplicate input name '" + in.name + "'");
    }
  }

  InputSpace(std::initializer_list<UncertainInput> inputs) : InputSpace(std::vector<UncertainInput>(inputs)) {}

  /// Unit hypercube [-1, 1]^d with generated names, for working directly in
  /// standard coordinates.
  static InputSpace standard(std::size_t d) {
    std::vector<UncertainInput> in;
    for (std::size_t i = 0; i < d; ++i) in.push_back({"xi" + std::to_string(i + 1), -1.0, 1.0});
    return InputSpace(std::move(in));
  }

  std::size_t dimension() const noexcept { return inputs_.size(); }
  const std::vector<UncertainInput>& inputs() const noexcept { return inputs_; }
  const UncertainInput& operator[](std::size_t i) const { return inputs_.at(i); }

  /// Index of the input with the given name, or dimension() if absent.
  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < inputs_.size(); ++i)
      if (inputs_[i].name == name) return i;
    return inputs_.size();
  }

  std::vector<double> midpoint() const {
    std::vector<double> mid(inputs_.size());
    for (std::size_t i = 0; i < inputs_.size(); ++i) mid[i] = 0.5 * (inputs_[i].lower + inputs_[i].upper);
    return mid;
  }

  /// d(physical)/d(standard) for input i.
  double half_width(std::size_t i) const { return 0.5 * (inputs_[i].upper - inputs_[i].lower); }

  bool operator==(const InputSpace& other) const {
    if (inputs_.size() != other.inputs_.size()) return false;
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      const auto& a = inputs_[i];
      const auto& b = other.inputs_[i];
      if (a.name != b.name || a.lower != b.lower || a.upper != b.upper) return false;
    }
    return true;
  }

 private:
  std::vector<UncertainInput> inputs_;
};

/// Table 1 of the gust problem: flight velocity, gust length, gust peak velocity.
inline InputSpace gust_input_space() {
  return InputSpace{{"flight_velocity", 40.0, 60.0}, {"gust_length", 4.0, 8.0}, {"gust_peak_velocity", 5.0, 15.0}};
}

/// Default number of surrogate evaluations behind sampled risk measures.
inline constexpr std::size_t kDefaultSurrogateSamples = 1'000'000;

inline constexpr std::size_t kQoICount = 2;

enum class QoI : std::size_t { MaxTipDisplacement = 0, AvgStrainEnergy = 1 };

inline constexpr std::array<QoI, kQoICount> kAllQoIs{QoI::MaxTipDisplacement, QoI::AvgStrainEnergy};

inline const char* qoi_name(QoI q) {
  return q == QoI::MaxTipDisplacement ? "max_tip_displacement" : "avg_strain_energy";
}

struct QoIRecord {
  double max_tip_displacement = 0.0;  // m
  double avg_strain_energy = 0.0;     // J

  double operator[](QoI q) const {
    return q == QoI::MaxTipDisplacement ? max_tip_displacement : avg_strain_energy;
  }
  double& operator[](QoI q) { return q == QoI::MaxTipDisplacement ? max_tip_displacement : avg_strain_energy; }

  friend bool operator==(const QoIRecord&, const QoIRecord&) = default;
};

/// Rows follow QoI order, columns follow InputSpace order.
using QoIGradient = Eigen::Matrix<double, 2, Eigen::Dynamic>;

struct RiskMeasures {
  double mean = 0.0;
  double std_dev = 0.0;
  double p95 = 0.0;  // quantile at the requested probability (0.95 unless stated)

  friend bool operator==(const RiskMeasures&, const RiskMeasures&) = default;
};

/// Evaluation contract for a model mapping a physical input point to both QoIs.
/// evaluate must be pure. Gradients are an optional capability.
class ModelOracle {
 public:
  virtual ~ModelOracle() = default;

  virtual QoIRecord evaluate(std::span<const double> x) const = 0;

  virtual bool has_gradient() const { return false; }

  virtual QoIGradient gradient(std::span<const double> /*x*/) const {
    throw CapabilityError("oracle does not provide gradients");
  }
};

// ---------------------------------------------------------------------------
// Standard-space transforms

inline std::vector<double> to_standard(std::span<const double> x, const InputSpace& space) {
  if (x.size() != space.dimension()) throw ArgumentError("point dimension does not match input space");
  std::vector<double> xi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& in = space[i];
    if (!(x[i] >= in.lower && x[i] <= in.upper))
      throw DomainError("input '" + in.name + "' = " + std::to_string(x[i]) + " outside [" +
                        std::to_string(in.lower) + ", " + std::to_string(in.upper) + "]");
    xi[i] = 2.0 * (x[i] - in.lower) / (in.upper - in.lower) - 1.0;
  }
  return xi;
}

inline std::vector<double> from_standard(std::span<const double> xi, const InputSpace& space) {
  if (xi.size() != space.dimension()) throw ArgumentError("point dimension does not match input space");
  std::vector<double> x(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const auto& in = space[i];
    x[i] = in.lower + 0.5 * (xi[i] + 1.0) * (in.upper - in.lower);
  }
  return x;
}

inline PointSet to_standard(const PointSet& x, const InputSpace& space) {
  PointSet out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    auto xi = to_standard(row_span(x, i), space);
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = xi[static_cast<std::size_t>(j)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling plans

/// Latin hypercube design in physical coordinates: along every dimension each of
/// the n equal-width strata holds exactly one point.
inline PointSet latin_hypercube(std::size_t n, const InputSpace& space, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("latin_hypercube needs n >= 1");
  const std::size_t d = space.dimension();
  const CounterStream stream(seed, "latin_hypercube");
  PointSet points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> strata(n);
  std::uint64_t counter = 0;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) strata[i] = i;
    // Fisher-Yates with our own stream so the permutation is library-independent.
    for (std::size_t i = n; i-- > 1;) {
      auto r = static_cast<std::size_t>(stream.uniform(counter++) * static_cast<double>(i + 1));
      std::swap(strata[i], strata[std::min(r, i)]);
    }
    const auto& in = space[j];
    const double width = (in.upper - in.lower) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = stream.uniform(counter++);
      double v = in.lower + (static_cast<double>(strata[i]) + u) * width;
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::clamp(v, in.lower, in.upper);
    }
  }
  return points;
}

/// Independent uniform draws in standard coordinates; draw (i, j) uses stream
/// index i*d + j, so the first n rows of a longer run equal a shorter run.
inline PointSet uniform_standard_samples(std::size_t n, std::size_t d, const CounterStream& stream) {
  PointSet points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = stream.symmetric(i * d + j);
  return points;
}

// ---------------------------------------------------------------------------
// Risk measures

/// 1-based nearest rank ceil(p*N), clamped to [1, N].
inline std::size_t nearest_rank(std::size_t n, double p) {
  if (n == 0) throw ArgumentError("quantile of an empty sample");
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("quantile probability must lie in (0, 1)");
  const double pn = p * static_cast<double>(n);
  // Absorb representation error in p*N, e.g. 0.95*100 must give rank 95.
  auto rank = static_cast<std::size_t>(std::ceil(pn - 1e-9 * std::max(1.0, pn)));
  return std::clamp<std::size_t>(rank, 1, n);
}

/// Nearest-rank quantile: the ceil(p*N)-th smallest value. Reorders `values`.
inline double nearest_rank_quantile(std::vector<double>& values, double p) {
  const std::size_t rank = nearest_rank(values.size(), p);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

inline double sample_mean(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("mean of an empty sample");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  double mean = sum / n;
  // Second pass removes the rounding drift of the naive sum.
  double corr = 0.0;
  for (double v : values) corr += v - mean;
  return mean + corr / n;
}

/// Mean, Bessel-corrected standard deviation and nearest-rank p-quantile.
/// Statistics are accumulated over the sorted sample, so the result is
/// bit-identical under any permutation of the input.
inline RiskMeasures risk_from_samples(std::span<const double> values, double p = 0.95) {
  if (values.size() < 2) throw ArgumentError("risk measures need at least 2 values");
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("quantile probability must lie in (0, 1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  RiskMeasures r;
  r.mean = sample_mean(sorted);
  double ss = 0.0;
  for (double v : sorted) ss += (v - r.mean) * (v - r.mean);
  r.std_dev = std::sqrt(ss / static_cast<double>(sorted.size() - 1));
  r.p95 = sorted[nearest_rank(sorted.size(), p) - 1];
  return r;
}

}  // namespace gustuq
