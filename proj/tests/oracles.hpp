#pragma once

// Reference computations for the tests. None of these call into the library's
// numerics, so agreement is evidence rather than tautology.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Closed-form Legendre polynomials P_0..P_6.
inline double legendre(unsigned n, double x) {
  const double x2 = x * x;
  switch (n) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return 0.5 * (3 * x2 - 1);
    case 3: return 0.5 * (5 * x2 - 3) * x;
    case 4: return (35 * x2 * x2 - 30 * x2 + 3) / 8.0;
    case 5: return (63 * x2 * x2 - 70 * x2 + 15) * x / 8.0;
    case 6: return (231 * x2 * x2 * x2 - 315 * x2 * x2 + 105 * x2 - 5) / 16.0;
  }
  return NAN;
}

/// Legendre polynomial normalized to unit variance under U(-1, 1).
inline double legendre_unit(unsigned n, double x) { return std::sqrt(2.0 * n + 1.0) * legendre(n, x); }

/// E[xi^k] for xi ~ U(-1, 1).
inline double uniform_moment(unsigned k) { return k % 2 ? 0.0 : 1.0 / (k + 1.0); }

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  return s * h / 3.0;
}

/// Central finite difference of a vector-valued f; returns rows = outputs.
inline std::vector<std::vector<double>> central_difference(
    const std::function<std::vector<double>(const std::vector<double>&)>& f, const std::vector<double>& x,
    double rel_step) {
  const std::size_t d = x.size();
  std::vector<std::vector<double>> jac;
  for (std::size_t j = 0; j < d; ++j) {
    const double h = rel_step * std::max(std::abs(x[j]), 1.0);
    std::vector<double> xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const auto fp = f(xp), fm = f(xm);
    if (jac.empty()) jac.assign(fp.size(), std::vector<double>(d));
    for (std::size_t i = 0; i < fp.size(); ++i) jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

/// Indices of strict interior local maxima of a sampled signal.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& v, std::size_t from = 1) {
  std::vector<std::size_t> out;
  for (std::size_t i = std::max<std::size_t>(from, 1); i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) out.push_back(i);
  return out;
}

/// Undamped single-degree-of-freedom response to a step force F from rest.
inline double step_response(double force, double stiffness, double omega, double t) {
  return force / stiffness * (1.0 - std::cos(omega * t));
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
