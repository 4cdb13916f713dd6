#pragma once

#include <cmath>
#include <vector>

#include "gustuq/core.hpp"
#include "gustuq/random.hpp"
#include "oracles.hpp"

namespace oracle {

using namespace gustuq;

// f(xi) = sum_i sum_m a[i][m] xi_i^m + c12 xi_1 xi_2 in standard coordinates,
// served through a physical input space; both QoIs are f, the second scaled by 2.
class PolyOracle final : public ModelOracle {
 public:
  PolyOracle(InputSpace space, std::vector<std::vector<double>> a, double c12 = 0.0, bool gradients = true)
      : space_(std::move(space)), a_(std::move(a)), c12_(c12), gradients_(gradients) {}

  QoIRecord evaluate(std::span<const double> x) const override {
    ++evaluations;
    const auto xi = to_standard(x, space_);
    const double f = value(xi);
    return {f, 2.0 * f};
  }
  bool has_gradient() const override { return gradients_; }
  QoIGradient gradient(std::span<const double> x) const override {
    if (!gradients_) return ModelOracle::gradient(x);
    ++gradient_calls;
    const auto xi = to_standard(x, space_);
    QoIGradient g(2, static_cast<Eigen::Index>(xi.size()));
    for (std::size_t i = 0; i < xi.size(); ++i) {
      double d = 0.0;
      for (std::size_t m = 1; m < a_[i].size(); ++m) d += m * a_[i][m] * std::pow(xi[i], m - 1);
      if (i == 0) d += c12_ * xi[1];
      if (i == 1) d += c12_ * xi[0];
      d /= space_.half_width(i);
      g(0, static_cast<Eigen::Index>(i)) = d;
      g(1, static_cast<Eigen::Index>(i)) = 2.0 * d;
    }
    return g;
  }

  double value(std::span<const double> xi) const {
    double f = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i)
      for (std::size_t m = 0; m < a_[i].size(); ++m) f += a_[i][m] * std::pow(xi[i], m);
    if (xi.size() >= 2) f += c12_ * xi[0] * xi[1];
    return f;
  }

  // Moments of the additive part under independent U(-1, 1) inputs.
  double analytic_mean() const {
    double m = 0.0;
    for (const auto& ai : a_)
      for (std::size_t k = 0; k < ai.size(); ++k) m += ai[k] * oracle::uniform_moment(k);
    return m;
  }
  double analytic_variance() const {
    double v = 0.0;
    for (const auto& ai : a_) {
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t k = 0; k < ai.size(); ++k) {
        m1 += ai[k] * oracle::uniform_moment(k);
        for (std::size_t l = 0; l < ai.size(); ++l) m2 += ai[k] * ai[l] * oracle::uniform_moment(k + l);
      }
      v += m2 - m1 * m1;
    }
    return v;
  }

  mutable std::size_t evaluations = 0;
  mutable std::size_t gradient_calls = 0;

 private:
  InputSpace space_;
  std::vector<std::vector<double>> a_;
  double c12_;
  bool gradients_;
};

inline InputSpace box3() { return InputSpace({{"a", 2.0, 6.0}, {"b", -1.0, 1.0}, {"c", 10.0, 11.0}}); }

inline std::vector<std::vector<double>> random_coeffs(std::size_t d, std::size_t degree, std::uint64_t seed) {
  const CounterStream rng(seed, "coeffs");
  std::vector<std::vector<double>> a(d, std::vector<double>(degree + 1));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t m = 0; m <= degree; ++m) a[i][m] = rng.symmetric(i * 100 + m);
  return a;
}

}  // namespace oracle
