#pragma once

// Ordinary kriging: constant-mean Gaussian process with an anisotropic
// squared-exponential correlation
//
//   R_ij = exp(-sum_k theta_k (xi_ik - xi_jk)^2)
//
// Hyperparameters maximize the concentrated log-likelihood
// -(n/2) log sigma^2(theta) - 1/2 log det R(theta), searched over a log-spaced
// multi-start grid and refined by coordinate descent in log10(theta).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gustuq/core.hpp"
#include "gustuq/errors.hpp"
#include "gustuq/random.hpp"

namespace gustuq {

struct KrigingOptions {
  double nugget = 1e-10;
  double max_nugget = 1e-4;  // escalation ceiling (x10 per step)
  std::size_t grid_levels = 5;
  double theta_min = 1e-2;
  double theta_max = 1e2;
  double refine_tolerance = 1e-3;  // final step in log10(theta)
  std::size_t max_refine_evaluations = 400;
};

/// Concentrated likelihood and the GLS quantities it is built from.
struct LikelihoodTerms {
  double log_likelihood = 0.0;
  double beta = 0.0;
  double sigma2 = 0.0;
};

namespace detail {

inline Eigen::MatrixXd correlation_matrix(const PointSet& pts, std::span<const double> theta, double nugget) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index d = pts.cols();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0 + nugget;
    for (Eigen::Index j = 0; j < i; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = pts(i, k) - pts(j, k);
        s += theta[static_cast<std::size_t>(k)] * diff * diff;
      }
      r(i, j) = r(j, i) = std::exp(-s);
    }
  }
  return r;
}

struct Factorized {
  Eigen::LLT<Eigen::MatrixXd> llt;
  LikelihoodTerms terms;
};

inline std::optional<Factorized> factorize(const PointSet& pts, std::span<const double> values,
                                           std::span<const double> theta, double nugget) {
  const Eigen::Index n = pts.rows();
  Factorized f{Eigen::LLT<Eigen::MatrixXd>(correlation_matrix(pts, theta, nugget)), {}};
  if (f.llt.info() != Eigen::Success) return std::nullopt;
  const auto& l = f.llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double di = l(i, i);
    if (!(di > 0.0) || !std::isfinite(di)) return std::nullopt;
    log_det += 2.0 * std::log(di);
  }
  Eigen::Map<const Eigen::VectorXd> y(values.data(), n);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd r_inv_one = f.llt.solve(ones);
  const Eigen::VectorXd r_inv_y = f.llt.solve(y);
  const double denom = ones.dot(r_inv_one);
  if (!(denom > 0.0)) return std::nullopt;
  f.terms.beta = ones.dot(r_inv_y) / denom;
  const Eigen::VectorXd resid = y - f.terms.beta * ones;
  f.terms.sigma2 = resid.dot(f.llt.solve(resid)) / static_cast<double>(n);
  if (!(f.terms.sigma2 > 0.0) || !std::isfinite(f.terms.sigma2)) return std::nullopt;
  f.terms.log_likelihood = -0.5 * static_cast<double>(n) * std::log(f.terms.sigma2) - 0.5 * log_det;
  if (!std::isfinite(f.terms.log_likelihood)) return std::nullopt;
  return f;
}

// Solves R w = b by conjugate gradients preconditioned with the factorization
// of R + nugget*I. Starting from the nugget solution, this removes the
// training-point residual the nugget would otherwise leave behind
// (nugget * w). Stops early if R turns out numerically indefinite.
inline Eigen::VectorXd refined_solve(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& r,
                                     const Eigen::VectorXd& b) {
  // PCG on R preconditioned by the nuggeted factor. When R is numerically
  // indefinite the iteration can wander, so keep the iterate with the
  // smallest true residual and quit once it is clearly diverging.
  Eigen::VectorXd w = llt.solve(b);
  Eigen::VectorXd res = b - r * w;
  Eigen::VectorXd best = w;
  double best_norm = res.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd z = llt.solve(res);
  Eigen::VectorXd dir = z;
  double rz = res.dot(z);
  const double tol = 1e-14 * b.lpNorm<Eigen::Infinity>();
  for (Eigen::Index it = 0; it < r.rows() && best_norm > tol && rz > 0.0; ++it) {
    const Eigen::VectorXd q = r * dir;
    const double curvature = dir.dot(q);
    if (!(curvature > 0.0)) break;
    const double alpha = rz / curvature;
    w += alpha * dir;
    res -= alpha * q;
    const double true_norm = (b - r * w).lpNorm<Eigen::Infinity>();
    if (!(true_norm < 10.0 * best_norm)) break;
    if (true_norm < best_norm) {
      best = w;
      best_norm = true_norm;
    }
    z = llt.solve(res);
    const double rz_next = res.dot(z);
    dir = z + (rz_next / rz) * dir;
    rz = rz_next;
  }
  return best;
}

}  // namespace detail

/// Concentrated log-likelihood at theta, or nullopt when R + nugget*I is not
/// numerically positive definite.
inline std::optional<LikelihoodTerms> kriging_log_likelihood(const PointSet& points, std::span<const double> values,
                                                             std::span<const double> theta, double nugget) {
  auto f = detail::factorize(points, values, theta, nugget);
  if (!f) return std::nullopt;
  return f->terms;
}

/// log10-spaced grid of starting lengthscale vectors, in row-major grid order.
inline std::vector<std::vector<double>> kriging_theta_grid(std::size_t d, const KrigingOptions& opt = {}) {
  const double lo = std::log10(opt.theta_min);
  const double hi = std::log10(opt.theta_max);
  const std::size_t levels = std::max<std::size_t>(opt.grid_levels, 1);
  std::vector<double> axis(levels);
  for (std::size_t i = 0; i < levels; ++i)
    axis[i] = levels == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(levels - 1);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= levels;
  std::vector<std::vector<double>> grid(total, std::vector<double>(d));
  for (std::size_t g = 0; g < total; ++g) {
    std::size_t rem = g;
    for (std::size_t k = d; k-- > 0;) {
      grid[g][k] = std::pow(10.0, axis[rem % levels]);
      rem /= levels;
    }
  }
  return grid;
}

class KrigingModel {
 public:
  KrigingModel() = default;

  /// Rebuilds a model from its defining data (e.g. after deserialization).
  /// The correlation matrix is refactorized; throws FitError if it is not SPD.
  KrigingModel(PointSet points, std::vector<double> values, std::vector<double> theta, double nugget)
      : points_(std::move(points)), values_(std::move(values)), theta_(std::move(theta)), nugget_(nugget) {
    const std::size_t n = values_.size();
    if (static_cast<std::size_t>(points_.rows()) != n) throw ArgumentError("point and value counts differ");
    if (theta_.size() != static_cast<std::size_t>(points_.cols())) throw ArgumentError("theta dimension mismatch");
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    if (*lo == *hi) {
      // Constant data: sigma^2 = 0 and the predictor is the constant itself.
      beta_ = *lo;
      sigma2_ = 0.0;
      weights_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      log_likelihood_ = std::numeric_limits<double>::infinity();
      return;
    }
    auto f = detail::factorize(points_, values_, theta_, nugget_);
    if (!f) throw FitError("kriging correlation matrix is not positive definite; increase the nugget");
    beta_ = f->terms.beta;
    sigma2_ = f->terms.sigma2;
    log_likelihood_ = f->terms.log_likelihood;
    Eigen::Map<const Eigen::VectorXd> y(values_.data(), static_cast<Eigen::Index>(n));
    weights_ = detail::refined_solve(f->llt, detail::correlation_matrix(points_, theta_, 0.0),
                                     y - beta_ * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
    llt_ = std::move(f->llt);
    r_inv_one_ = llt_.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
  }

  const PointSet& points() const noexcept { return points_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& theta() const noexcept { return theta_; }
  double beta() const noexcept { return beta_; }
  double process_variance() const noexcept { return sigma2_; }
  double nugget() const noexcept { return nugget_; }
  double log_likelihood() const noexcept { return log_likelihood_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }

  /// mu(xi) = beta + r(xi)^T R^{-1} (y - beta 1); the weights are refined
  /// against R itself, so the nugget does not spoil interpolation.
  double predict(std::span<const double> xi) const {
    const Eigen::Index n = points_.rows();
    const Eigen::Index d = points_.cols();
    double s = beta_;
    if (sigma2_ == 0.0) return s;
    for (Eigen::Index i = 0; i < n; ++i) {
      double e = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = xi[static_cast<std::size_t>(k)] - points_(i, k);
        e += theta_[static_cast<std::size_t>(k)] * diff * diff;
      }
      s += weights_[i] * std::exp(-e);
    }
    return s;
  }

  /// Ordinary-kriging mean squared error of the predictor.
  double predict_variance(std::span<const double> xi) const {
    if (sigma2_ == 0.0) return 0.0;
    const Eigen::Index n = points_.rows();
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double e = 0.0;
      for (Eigen::Index k = 0; k < points_.cols(); ++k) {
        const double diff = xi[static_cast<std::size_t>(k)] - points_(i, k);
        e += theta_[static_cast<std::size_t>(k)] * diff * diff;
      }
      r[i] = std::exp(-e);
    }
    const Eigen::VectorXd r_inv_r = llt_.solve(r);
    const double u = 1.0 - r_inv_one_.dot(r);
    const double mse = sigma2_ * (1.0 - r.dot(r_inv_r) + u * u / r_inv_one_.sum());
    return std::max(mse, 0.0);
  }

 private:
  PointSet points_;
  std::vector<double> values_;
  std::vector<double> theta_;
  double nugget_ = 0.0;
  double beta_ = 0.0;
  double sigma2_ = 0.0;
  double log_likelihood_ = 0.0;
  Eigen::VectorXd weights_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd r_inv_one_;
};

/// Fits an ordinary kriging model to values at standard points.
inline KrigingModel kriging_fit(const PointSet& points, std::span<const double> values, const KrigingOptions& opt = {}) {
  const std::size_t n = values.size();
  const std::size_t d = static_cast<std::size_t>(points.cols());
  if (static_cast<std::size_t>(points.rows()) != n) throw ArgumentError("point and value counts differ");
  if (d == 0) throw ArgumentError("kriging needs at least one input dimension");
  if (n < d + 2) throw ArgumentError("kriging needs at least d + 2 = " + std::to_string(d + 2) + " points");
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if ((points.row(i) - points.row(j)).norm() < 1e-10)
        throw ArgumentError("duplicate kriging training points " + std::to_string(j) + " and " + std::to_string(i));

  std::vector<double> vals(values.begin(), values.end());
  const auto grid = kriging_theta_grid(d, opt);
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  if (*lo == *hi) return KrigingModel(points, std::move(vals), grid.front(), opt.nugget);

  for (double nugget = opt.nugget; nugget <= opt.max_nugget * (1.0 + 1e-9); nugget *= 10.0) {
    // Multi-start: best grid point, lowest grid index on ties.
    double best_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> best_log;
    for (const auto& theta : grid) {
      auto ll = kriging_log_likelihood(points, vals, theta, nugget);
      if (ll && ll->log_likelihood > best_ll) {
        best_ll = ll->log_likelihood;
        best_log.resize(d);
        for (std::size_t k = 0; k < d; ++k) best_log[k] = std::log10(theta[k]);
      }
    }
    if (best_log.empty()) continue;

    // Coordinate descent in log10(theta), bounded by the grid range.
    const double lo_log = std::log10(opt.theta_min);
    const double hi_log = std::log10(opt.theta_max);
    double step = opt.grid_levels > 1 ? (hi_log - lo_log) / static_cast<double>(opt.grid_levels - 1) / 2.0 : 0.5;
    std::size_t evals = 0;
    std::vector<double> trial(d);
    while (step >= opt.refine_tolerance && evals < opt.max_refine_evaluations) {
      bool improved = false;
      for (std::size_t k = 0; k < d && evals < opt.max_refine_evaluations; ++k) {
        for (double dir : {1.0, -1.0}) {
          std::vector<double> cand = best_log;
          cand[k] = std::clamp(cand[k] + dir * step, lo_log, hi_log);
          if (cand[k] == best_log[k]) continue;
          for (std::size_t m = 0; m < d; ++m) trial[m] = std::pow(10.0, cand[m]);
          ++evals;
          auto ll = kriging_log_likelihood(points, vals, trial, nugget);
          if (ll && ll->log_likelihood > best_ll) {
            best_ll = ll->log_likelihood;
            best_log = cand;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    std::vector<double> theta(d);
    for (std::size_t k = 0; k < d; ++k) theta[k] = std::pow(10.0, best_log[k]);
    return KrigingModel(points, std::move(vals), std::move(theta), nugget);
  }
  throw FitError("kriging correlation matrix not positive definite at any start up to nugget " +
                 std::to_string(opt.max_nugget) + "; increase the nugget");
}

/// Surrogate evaluations at n seeded uniform standard points.
inline std::vector<double> kriging_sample_values(const KrigingModel& model, std::size_t n, std::uint64_t seed) {
  const std::size_t d = model.dimension();
  const CounterStream stream(seed, "kriging_samples");
  std::vector<double> xi(d), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) xi[j] = stream.symmetric(i * d + j);
    out[i] = model.predict(xi);
  }
  return out;
}

/// Risk measures of the surrogate under the uniform input distribution.
inline RiskMeasures kriging_risk(const KrigingModel& model, double p = 0.95,
                                 std::size_t n_samples = kDefaultSurrogateSamples, std::uint64_t seed = 0) {
  const auto values = kriging_sample_values(model, n_samples, seed);
  return risk_from_samples(values, p);
}

}  // namespace gustuq
