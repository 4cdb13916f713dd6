#pragma once

// Regression-based non-intrusive polynomial chaos on an orthonormal Legendre
// tensor basis. Surrogates live in standard coordinates [-1, 1]^d.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gustuq/core.hpp"
#include "gustuq/errors.hpp"
#include "gustuq/polynomials.hpp"
#include "gustuq/random.hpp"

namespace gustuq {

struct MultiIndex {
  std::vector<unsigned> degrees;

  unsigned total_degree() const { return std::accumulate(degrees.begin(), degrees.end(), 0u); }
  bool is_zero() const { return total_degree() == 0; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace detail {

// Compositions of `remaining` into the slots from `pos` on, first slot largest first.
inline void enumerate_compositions(std::vector<unsigned>& cur, std::size_t pos, unsigned remaining,
                                   std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back({cur});
    return;
  }
  for (unsigned v = remaining + 1; v-- > 0;) {
    cur[pos] = v;
    enumerate_compositions(cur, pos + 1, remaining - v, out);
  }
}

}  // namespace detail

/// All multi-indices of total degree <= p, graded: by total degree, and within a
/// degree in descending lexicographic order, e.g. (1,0,0), (0,1,0), (0,0,1).
inline std::vector<MultiIndex> total_degree_basis(std::size_t d, unsigned p) {
  if (d == 0) throw ArgumentError("basis dimension must be >= 1");
  std::vector<MultiIndex> basis;
  basis.reserve(binomial(d + p, p));
  std::vector<unsigned> cur(d, 0);
  for (unsigned t = 0; t <= p; ++t) detail::enumerate_compositions(cur, 0, t, basis);
  return basis;
}

/// Polynomial chaos surrogate: f(xi) = sum_a c_a prod_i psi_{a_i}(xi_i).
/// The zero multi-index, when present, is first.
class PCESurrogate {
 public:
  PCESurrogate() = default;

  PCESurrogate(InputSpace space, std::vector<MultiIndex> basis, std::vector<double> coefficients)
      : space_(std::move(space)), basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
    if (basis_.size() != coefficients_.size()) throw ArgumentError("PCE basis and coefficient counts differ");
    for (const auto& a : basis_) {
      if (a.degrees.size() != space_.dimension()) throw ArgumentError("multi-index dimension mismatch");
      max_degree_ = std::max(max_degree_, *std::max_element(a.degrees.begin(), a.degrees.end()));
    }
  }

  const InputSpace& space() const noexcept { return space_; }
  const std::vector<MultiIndex>& basis() const noexcept { return basis_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  std::size_t dimension() const noexcept { return space_.dimension(); }

  /// Coefficient of `index`, zero if the index is not in the basis.
  double coefficient(const MultiIndex& index) const {
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] == index) return coefficients_[i];
    return 0.0;
  }

  double predict_standard(std::span<const double> xi) const {
    const std::size_t d = space_.dimension();
    const std::size_t stride = max_degree_ + 1;
    thread_local std::vector<double> table;
    table.resize(d * stride);
    for (std::size_t i = 0; i < d; ++i) legendre_orthonormal_table(max_degree_, xi[i], &table[i * stride]);
    double s = 0.0;
    for (std::size_t a = 0; a < basis_.size(); ++a) {
      if (coefficients_[a] == 0.0) continue;
      double term = coefficients_[a];
      const auto& deg = basis_[a].degrees;
      for (std::size_t i = 0; i < d; ++i) term *= table[i * stride + deg[i]];
      s += term;
    }
    return s;
  }

  double predict(std::span<const double> x) const { return predict_standard(to_standard(x, space_)); }

  double mean() const {
    for (std::size_t a = 0; a < basis_.size(); ++a)
      if (basis_[a].is_zero()) return coefficients_[a];
    return 0.0;
  }

  double variance() const {
    double v = 0.0;
    for (std::size_t a = 0; a < basis_.size(); ++a)
      if (!basis_[a].is_zero()) v += coefficients_[a] * coefficients_[a];
    return v;
  }

 private:
  InputSpace space_;
  std::vector<MultiIndex> basis_;
  std::vector<double> coefficients_;
  unsigned max_degree_ = 0;
};

/// Minimum regression sample count: twice the basis size.
inline std::size_t pce_required_samples(std::size_t d, unsigned p) { return 2 * binomial(d + p, p); }

/// Least-squares fit of a total-degree-p expansion to values at standard points,
/// via column-pivoted Householder QR.
inline PCESurrogate fit_regression(const InputSpace& space, const PointSet& points, std::span<const double> values,
                                   unsigned p) {
  const std::size_t d = space.dimension();
  if (static_cast<std::size_t>(points.cols()) != d) throw ArgumentError("point dimension does not match input space");
  if (static_cast<std::size_t>(points.rows()) != values.size())
    throw ArgumentError("point and value counts differ");
  auto basis = total_degree_basis(d, p);
  const std::size_t n = values.size();
  const std::size_t required = 2 * basis.size();
  if (n < required)
    throw ArgumentError("regression of degree " + std::to_string(p) + " in " + std::to_string(d) + " dimensions needs " +
                        std::to_string(required) + " samples, got " + std::to_string(n));

  const std::size_t stride = p + 1;
  std::vector<double> table(d * stride);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < d; ++i)
      legendre_orthonormal_table(p, points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)), &table[i * stride]);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      double v = 1.0;
      for (std::size_t i = 0; i < d; ++i) v *= table[i * stride + basis[a].degrees[i]];
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) = v;
    }
  }
  Eigen::Map<const Eigen::VectorXd> y(values.data(), static_cast<Eigen::Index>(n));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (static_cast<std::size_t>(qr.rank()) < basis.size())
    throw FitError("PCE design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                   std::to_string(basis.size()) + ")");
  Eigen::VectorXd c = qr.solve(y);
  return PCESurrogate(space, std::move(basis), std::vector<double>(c.data(), c.data() + c.size()));
}

struct Moments {
  double mean = 0.0;
  double std_dev = 0.0;
};

/// Mean is the zero-index coefficient; variance the sum of the other squares.
inline Moments pce_moments(const PCESurrogate& s) { return {s.mean(), std::sqrt(s.variance())}; }

/// Surrogate evaluations at n seeded uniform standard points.
inline std::vector<double> pce_sample_values(const PCESurrogate& s, std::size_t n, std::uint64_t seed) {
  const std::size_t d = s.dimension();
  const CounterStream stream(seed, "pce_samples");
  std::vector<double> xi(d), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) xi[j] = stream.symmetric(i * d + j);
    out[i] = s.predict_standard(xi);
  }
  return out;
}

/// Nearest-rank quantile of the surrogate under the input distribution.
inline double pce_quantile(const PCESurrogate& s, double p, std::size_t n_samples = kDefaultSurrogateSamples,
                           std::uint64_t seed = 0) {
  if (n_samples < 10'000) throw ArgumentError("pce_quantile needs at least 10^4 samples");
  auto values = pce_sample_values(s, n_samples, seed);
  return nearest_rank_quantile(values, p);
}

}  // namespace gustuq
