#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "gustuq/errors.hpp"

namespace gustuq {

/// Legendre P_n(x) by the three-term recurrence
/// (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}.
inline double legendre(std::size_t n, double x) {
  double p_prev = 1.0;
  if (n == 0) return p_prev;
  double p = x;
  for (std::size_t j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0) * x * p - j * p_prev) / (j + 1.0);
    p_prev = p;
    p = next;
  }
  return p;
}

/// sqrt(2n+1) P_n(x): unit second moment under the uniform density on [-1, 1].
inline double legendre_orthonormal(std::size_t n, double x) {
  return std::sqrt(2.0 * static_cast<double>(n) + 1.0) * legendre(n, x);
}

/// Orthonormal Legendre values psi_0..psi_max at x, written into `out`.
inline void legendre_orthonormal_table(std::size_t max_degree, double x, double* out) {
  double p_prev = 1.0;
  double p = x;
  out[0] = 1.0;
  if (max_degree == 0) return;
  out[1] = std::sqrt(3.0) * x;
  for (std::size_t j = 1; j < max_degree; ++j) {
    const double next = ((2.0 * j + 1.0) * x * p - j * p_prev) / (j + 1.0);
    p_prev = p;
    p = next;
    out[j + 1] = std::sqrt(2.0 * (j + 1.0) + 1.0) * p;
  }
}

struct QuadratureRule {
  std::vector<double> nodes;    // ascending, on [-1, 1]
  std::vector<double> weights;  // sum to 2 (unit weight on [-1, 1])

  std::size_t order() const noexcept { return nodes.size(); }

  /// Expectation of f under U(-1, 1).
  template <class F>
  double expectation(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return 0.5 * s;
  }
};

namespace detail {

// Gauss-Legendre by Newton iteration on P_k from Chebyshev-like initial guesses.
inline QuadratureRule gauss_legendre_unchecked(std::size_t k) {
  QuadratureRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  const double kd = static_cast<double>(k);
  for (std::size_t i = 0; i < (k + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (kd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double p = legendre(k, x);
      const double p_prev = legendre(k - 1, x);
      dp = kd * (x * p - p_prev) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      const double p_prev = legendre(k - 1, x);
      dp = kd * (x * legendre(k, x) - p_prev) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[k - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[k - 1 - i] = w;
  }
  if (k % 2 == 1) rule.nodes[k / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// k-point Gauss-Legendre rule, exact for polynomials of degree <= 2k-1.
inline QuadratureRule gauss_legendre(std::size_t k) {
  if (k < 1 || k > 20) throw ArgumentError("gauss_legendre order must lie in [1, 20]");
  return detail::gauss_legendre_unchecked(k);
}

}  // namespace gustuq
