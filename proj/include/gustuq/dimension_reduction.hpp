#pragma once

// Univariate dimension reduction about the input-space midpoint mu:
//
//   f(x) ~ sum_i g_i(x_i) - (d - 1) f(mu),   g_i(x_i) = f(mu_1, .., x_i, .., mu_d)
//
// Each slice g_i is sampled at the k Gauss-Legendre nodes of its dimension and
// replaced by an interpolant: Lagrange through the values (UDR, degree k-1) or
// Hermite through values and slopes (GUDR, degree 2k-1). Slopes come from the
// oracle's gradient capability.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <vector>

#include "gustuq/core.hpp"
#include "gustuq/errors.hpp"
#include "gustuq/pce.hpp"
#include "gustuq/polynomials.hpp"

namespace gustuq {

/// Polynomial interpolant in Newton form. Repeated nodes carry derivative data
/// (confluent divided differences), which makes Hermite interpolation the
/// same code path as Lagrange interpolation.
class NewtonInterpolant {
 public:
  NewtonInterpolant() = default;

  /// Lagrange interpolant through (nodes[i], values[i]).
  static NewtonInterpolant lagrange(std::span<const double> nodes, std::span<const double> values) {
    if (nodes.size() != values.size() || nodes.empty()) throw ArgumentError("interpolation data size mismatch");
    NewtonInterpolant p;
    p.z_.assign(nodes.begin(), nodes.end());
    const std::size_t m = nodes.size();
    std::vector<double> dd(values.begin(), values.end());
    p.c_.resize(m);
    p.c_[0] = dd[0];
    for (std::size_t j = 1; j < m; ++j) {
      for (std::size_t i = m - 1; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / (p.z_[i] - p.z_[i - j]);
      p.c_[j] = dd[j];
    }
    return p;
  }

  /// Hermite interpolant matching values and first derivatives at each node.
  static NewtonInterpolant hermite(std::span<const double> nodes, std::span<const double> values,
                                   std::span<const double> derivatives) {
    if (nodes.size() != values.size() || nodes.size() != derivatives.size() || nodes.empty())
      throw ArgumentError("interpolation data size mismatch");
    NewtonInterpolant p;
    const std::size_t m = 2 * nodes.size();
    p.z_.resize(m);
    std::vector<double> dd(m);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      p.z_[2 * i] = p.z_[2 * i + 1] = nodes[i];
      dd[2 * i] = dd[2 * i + 1] = values[i];
    }
    p.c_.resize(m);
    p.c_[0] = dd[0];
    for (std::size_t j = 1; j < m; ++j) {
      for (std::size_t i = m - 1; i >= j; --i) {
        if (j == 1 && p.z_[i] == p.z_[i - 1])
          dd[i] = derivatives[i / 2];
        else
          dd[i] = (dd[i] - dd[i - 1]) / (p.z_[i] - p.z_[i - j]);
      }
      p.c_[j] = dd[j];
    }
    return p;
  }

  std::size_t degree() const noexcept { return c_.empty() ? 0 : c_.size() - 1; }
  const std::vector<double>& nodes() const noexcept { return z_; }
  const std::vector<double>& coefficients() const noexcept { return c_; }

  double operator()(double x) const {
    double s = c_.back();
    for (std::size_t j = c_.size() - 1; j-- > 0;) s = c_[j] + (x - z_[j]) * s;
    return s;
  }

  double derivative(double x) const {
    double s = c_.back();
    double ds = 0.0;
    for (std::size_t j = c_.size() - 1; j-- > 0;) {
      ds = s + (x - z_[j]) * ds;
      s = c_[j] + (x - z_[j]) * s;
    }
    return ds;
  }

 private:
  std::vector<double> z_;  // Newton nodes, repeated for derivative data
  std::vector<double> c_;  // divided differences f[z_0 .. z_j]
};

struct UnivariateSlice {
  std::size_t dimension = 0;
  std::vector<double> nodes;             // standard coordinates
  std::vector<double> node_values;
  std::vector<double> node_derivatives;  // d/dxi; empty for plain UDR
  NewtonInterpolant interpolant;
};

/// Additive approximation f^(xi) = sum_i g_i(xi_i) - (d - 1) f(mu).
struct UDRApprox {
  InputSpace space;
  double center_value = 0.0;
  std::vector<UnivariateSlice> slices;

  double predict_standard(std::span<const double> xi) const {
    double s = -(static_cast<double>(slices.size()) - 1.0) * center_value;
    for (const auto& sl : slices) s += sl.interpolant(xi[sl.dimension]);
    return s;
  }

  double predict(std::span<const double> x) const { return predict_standard(to_standard(x, space)); }

  bool gradient_enhanced() const { return !slices.empty() && !slices.front().node_derivatives.empty(); }
};

/// One approximation per QoI plus the oracle work spent building them.
struct DRBuild {
  std::array<UDRApprox, kQoICount> approx;
  std::size_t evaluations = 0;
  std::size_t gradient_evaluations = 0;

  const UDRApprox& operator[](QoI q) const { return approx[static_cast<std::size_t>(q)]; }
};

namespace detail {

inline QoIRecord evaluate_or_throw(const ModelOracle& oracle, std::span<const double> x) {
  try {
    return oracle.evaluate(x);
  } catch (const std::exception& e) {
    std::string where = "(";
    for (std::size_t i = 0; i < x.size(); ++i) where += (i ? ", " : "") + std::to_string(x[i]);
    throw OracleError("oracle failed at " + where + "): " + e.what());
  }
}

inline QoIGradient gradient_or_throw(const ModelOracle& oracle, std::span<const double> x) {
  try {
    return oracle.gradient(x);
  } catch (const CapabilityError&) {
    throw;
  } catch (const std::exception& e) {
    std::string where = "(";
    for (std::size_t i = 0; i < x.size(); ++i) where += (i ? ", " : "") + std::to_string(x[i]);
    throw OracleError("oracle gradient failed at " + where + "): " + e.what());
  }
}

inline DRBuild dr_build(const ModelOracle& oracle, const InputSpace& space, std::size_t k, bool with_gradient) {
  if (k < 1) throw ArgumentError("dimension reduction needs k >= 1");
  if (with_gradient && !oracle.has_gradient()) throw CapabilityError("GUDR needs an oracle with gradients");
  const std::size_t d = space.dimension();
  const QuadratureRule rule = gauss_legendre_unchecked(k);
  const std::vector<double> center = space.midpoint();

  DRBuild out;
  const QoIRecord f_center = evaluate_or_throw(oracle, center);
  ++out.evaluations;
  for (QoI q : kAllQoIs) {
    auto& a = out.approx[static_cast<std::size_t>(q)];
    a.space = space;
    a.center_value = f_center[q];
    a.slices.resize(d);
  }

  for (std::size_t i = 0; i < d; ++i) {
    std::array<std::vector<double>, kQoICount> vals, ders;
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> x = center;
      x[i] = space[i].lower + 0.5 * (rule.nodes[j] + 1.0) * (space[i].upper - space[i].lower);
      const QoIRecord f = evaluate_or_throw(oracle, x);
      ++out.evaluations;
      for (QoI q : kAllQoIs) vals[static_cast<std::size_t>(q)].push_back(f[q]);
      if (with_gradient) {
        const QoIGradient g = gradient_or_throw(oracle, x);
        ++out.gradient_evaluations;
        for (QoI q : kAllQoIs)
          ders[static_cast<std::size_t>(q)].push_back(g(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i)) *
                                                      space.half_width(i));
      }
    }
    for (QoI q : kAllQoIs) {
      const auto qi = static_cast<std::size_t>(q);
      auto& sl = out.approx[qi].slices[i];
      sl.dimension = i;
      sl.nodes = rule.nodes;
      sl.node_values = vals[qi];
      sl.node_derivatives = ders[qi];
      sl.interpolant = with_gradient ? NewtonInterpolant::hermite(sl.nodes, sl.node_values, sl.node_derivatives)
                                     : NewtonInterpolant::lagrange(sl.nodes, sl.node_values);
    }
  }
  return out;
}

}  // namespace detail

/// UDR with k Gauss-Legendre nodes per dimension: d*k + 1 evaluations.
inline DRBuild udr_build(const ModelOracle& oracle, const InputSpace& space, std::size_t k) {
  return detail::dr_build(oracle, space, k, false);
}

/// Gradient-enhanced UDR: the UDR evaluations plus a gradient at each of the
/// d*k slice nodes.
inline DRBuild gudr_build(const ModelOracle& oracle, const InputSpace& space, std::size_t k) {
  return detail::dr_build(oracle, space, k, true);
}

/// Gauss rule that integrates the square of every slice interpolant exactly.
inline QuadratureRule dr_moment_rule(const UDRApprox& approx) {
  std::size_t degree = 0;
  for (const auto& sl : approx.slices) degree = std::max(degree, sl.interpolant.degree());
  return detail::gauss_legendre_unchecked(degree + 1);
}

/// Mean and standard deviation of the additive approximation by Gauss-Legendre
/// quadrature of each slice; slice variances add by independence.
inline Moments dr_moments(const UDRApprox& approx) {
  const QuadratureRule rule = dr_moment_rule(approx);
  double mean = -(static_cast<double>(approx.slices.size()) - 1.0) * approx.center_value;
  double var = 0.0;
  for (const auto& sl : approx.slices) {
    const double m1 = rule.expectation([&](double x) { return sl.interpolant(x); });
    const double m2 = rule.expectation([&](double x) {
      const double dv = sl.interpolant(x) - m1;
      return dv * dv;
    });
    mean += m1;
    var += m2;
  }
  return {mean, std::sqrt(std::max(var, 0.0))};
}

/// The additive approximation as a polynomial chaos expansion: each slice is
/// projected onto orthonormal Legendre polynomials by quadrature, exact because
/// the interpolants are polynomials.
inline PCESurrogate dr_to_pce(const UDRApprox& approx) {
  const std::size_t d = approx.space.dimension();
  const QuadratureRule rule = dr_moment_rule(approx);
  std::vector<MultiIndex> basis;
  std::vector<double> coeffs;
  double constant = -(static_cast<double>(approx.slices.size()) - 1.0) * approx.center_value;
  basis.push_back({std::vector<unsigned>(d, 0)});
  coeffs.push_back(0.0);
  for (const auto& sl : approx.slices) {
    const std::size_t deg = sl.interpolant.degree();
    constant += rule.expectation([&](double x) { return sl.interpolant(x); });
    for (std::size_t n = 1; n <= deg; ++n) {
      MultiIndex idx{std::vector<unsigned>(d, 0)};
      idx.degrees[sl.dimension] = static_cast<unsigned>(n);
      basis.push_back(std::move(idx));
      coeffs.push_back(rule.expectation([&](double x) { return sl.interpolant(x) * legendre_orthonormal(n, x); }));
    }
  }
  coeffs[0] = constant;
  return PCESurrogate(approx.space, std::move(basis), std::move(coeffs));
}

/// p-quantile via sampling the PCE built from the approximation.
inline double dr_quantile(const UDRApprox& approx, double p, std::size_t n_samples = kDefaultSurrogateSamples,
                          std::uint64_t seed = 0) {
  return pce_quantile(dr_to_pce(approx), p, n_samples, seed);
}

}  // namespace gustuq
