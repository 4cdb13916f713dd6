#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gustuq/core.hpp"
#include "gustuq/pce.hpp"
#include "gustuq/random.hpp"
#include "oracles.hpp"

using namespace gustuq;

namespace {

PointSet standard_lhs(std::size_t n, std::size_t d, std::uint64_t seed) {
  return to_standard(latin_hypercube(n, InputSpace::standard(d), seed), InputSpace::standard(d));
}

double basis_value(const MultiIndex& a, std::span<const double> xi) {
  double v = 1.0;
  for (std::size_t i = 0; i < xi.size(); ++i) v *= oracle::legendre_unit(a.degrees[i], xi[i]);
  return v;
}

}  // namespace

TEST(Basis, CountsAndOrdering) {
  EXPECT_EQ(total_degree_basis(3, 2).size(), 10u);
  EXPECT_EQ(total_degree_basis(1, 3).size(), 4u);
  const auto zero = total_degree_basis(4, 0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_TRUE(zero[0].is_zero());
  for (std::size_t d = 1; d <= 4; ++d)
    for (unsigned p = 0; p <= 6; ++p) EXPECT_EQ(total_degree_basis(d, p).size(), binomial(d + p, p));

  const auto b = total_degree_basis(3, 2);
  const std::vector<std::vector<unsigned>> expected{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0},
                                                    {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b[i].degrees, expected[i]);
}

TEST(FitRegression, ConstantData) {
  const PointSet pts = standard_lhs(40, 3, 1);
  const auto s = fit_regression(InputSpace::standard(3), pts, std::vector<double>(40, 2.5), 3);
  EXPECT_NEAR(s.coefficients()[0], 2.5, 1e-12);
  for (std::size_t a = 1; a < s.coefficients().size(); ++a) EXPECT_NEAR(s.coefficients()[a], 0.0, 1e-12);
  const auto m = pce_moments(s);
  EXPECT_NEAR(m.mean, 2.5, 1e-12);
  EXPECT_NEAR(m.std_dev, 0.0, 1e-11);
  EXPECT_NEAR(pce_quantile(s, 0.95, 10'000, 3), 2.5, 1e-11);
}

TEST(FitRegression, RecoversSingleBasisFunction) {
  const std::size_t n = 30;
  const PointSet pts = standard_lhs(n, 3, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = oracle::legendre_unit(1, pts(i, 0));
  for (unsigned p : {1u, 2u}) {
    const auto s = fit_regression(InputSpace::standard(3), pts, y, p);
    const MultiIndex target{{1, 0, 0}};
    for (std::size_t a = 0; a < s.basis().size(); ++a)
      EXPECT_NEAR(s.coefficients()[a], s.basis()[a] == target ? 1.0 : 0.0, 1e-10);
  }
}

TEST(FitRegression, ProductOfTwoUniforms) {
  const std::size_t n = 40;
  const PointSet pts = standard_lhs(n, 2, 3);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = pts(i, 0) * pts(i, 1);
  const auto s = fit_regression(InputSpace::standard(2), pts, y, 2);
  const auto m = pce_moments(s);
  EXPECT_NEAR(m.mean, 0.0, 1e-12);
  // E[(x1 x2)^2] = E[x1^2] E[x2^2].
  EXPECT_NEAR(m.std_dev * m.std_dev, oracle::uniform_moment(2) * oracle::uniform_moment(2), 1e-12);
}

TEST(PceMoments, AnalyticUniform) {
  const InputSpace s1 = InputSpace::standard(1);
  const PCESurrogate f(s1, total_degree_basis(1, 1), {0.0, 1.0 / std::sqrt(3.0)});  // f = xi
  EXPECT_NEAR(pce_moments(f).mean, 0.0, 1e-15);
  EXPECT_NEAR(pce_moments(f).std_dev, std::sqrt(oracle::uniform_moment(2)), 1e-15);
  const InputSpace s2 = InputSpace::standard(2);
  const PCESurrogate g(s2, total_degree_basis(2, 1), {0.0, 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)});
  EXPECT_NEAR(g.variance(), 2.0 / 3.0, 1e-15);
  const std::vector<double> xi{0.3, -0.8};
  EXPECT_NEAR(g.predict_standard(xi), -0.5, 1e-15);
}

TEST(FitRegression, RandomPolynomialsAreRecovered) {
  const std::size_t d = 3;
  const InputSpace s = InputSpace::standard(d);
  const CounterStream rng(4, "random polynomials");
  for (unsigned p = 1; p <= 4; ++p) {
    const auto basis = total_degree_basis(d, p);
    for (std::size_t trial = 0; trial < 5; ++trial) {
      std::vector<double> c(basis.size());
      for (std::size_t a = 0; a < c.size(); ++a) c[a] = rng.symmetric(1000 * (10 * p + trial) + a);
      const std::size_t n = pce_required_samples(d, p);
      const PointSet pts = standard_lhs(n, d, 10 * p + trial);
      std::vector<double> y(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < basis.size(); ++a) y[i] += c[a] * basis_value(basis[a], row_span(pts, i));
      const auto fit = fit_regression(s, pts, y, p);
      for (std::size_t a = 0; a < c.size(); ++a) EXPECT_NEAR(fit.coefficients()[a], c[a], 1e-8);
    }
  }
}

TEST(FitRegression, MonomialExpansionMatchesAnalytic) {
  // x^2 = 1/3 + (2/3) P_2(x) = 1/3 + (2 / (3 sqrt 5)) psi_2(x).
  const PointSet pts = standard_lhs(20, 2, 9);
  std::vector<double> y(20);
  for (int i = 0; i < 20; ++i) y[i] = pts(i, 1) * pts(i, 1);
  const auto fit = fit_regression(InputSpace::standard(2), pts, y, 2);
  EXPECT_NEAR(fit.coefficient({{0, 0}}), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(fit.coefficient({{0, 2}}), 2.0 / (3.0 * std::sqrt(5.0)), 1e-12);
  EXPECT_NEAR(fit.coefficient({{1, 1}}), 0.0, 1e-12);
}

TEST(FitRegression, DuplicateSamplesDoNotChangeFit) {
  const std::size_t d = 3, n = 70;
  const PointSet pts = standard_lhs(n, d, 5);
  // Noise-free polynomial data, so duplicates cannot shift the least-squares solution.
  std::vector<double> yp(n);
  for (std::size_t i = 0; i < n; ++i) yp[i] = 1.0 + pts(i, 0) - 2.0 * pts(i, 1) * pts(i, 2) + pts(i, 2) * pts(i, 2) * pts(i, 0);
  PointSet dup(n + 10, d);
  dup.topRows(n) = pts;
  dup.bottomRows(10) = pts.topRows(10);
  std::vector<double> ydup = yp;
  ydup.insert(ydup.end(), yp.begin(), yp.begin() + 10);
  const auto a = fit_regression(InputSpace::standard(d), pts, yp, 3);
  const auto b = fit_regression(InputSpace::standard(d), dup, ydup, 3);
  for (std::size_t k = 0; k < a.coefficients().size(); ++k) EXPECT_NEAR(a.coefficients()[k], b.coefficients()[k], 1e-12);
}

TEST(FitRegression, Errors) {
  const PointSet pts = standard_lhs(19, 3, 6);
  try {
    fit_regression(InputSpace::standard(3), pts, std::vector<double>(19, 1.0), 2);
    FAIL() << "expected ArgumentError";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("needs 20"), std::string::npos);
  }
  PointSet same = PointSet::Constant(20, 3, 0.25);
  EXPECT_THROW(fit_regression(InputSpace::standard(3), same, std::vector<double>(20, 1.0), 2), FitError);
}

TEST(PceQuantile, UniformAndEquivariance) {
  const InputSpace s1 = InputSpace::standard(1);
  const PCESurrogate f(s1, total_degree_basis(1, 1), {0.0, 1.0 / std::sqrt(3.0)});
  const PCESurrogate f2(s1, total_degree_basis(1, 1), {0.0, 2.0 / std::sqrt(3.0)});
  const double q = pce_quantile(f, 0.95, 1'000'000, 11);
  EXPECT_NEAR(q, 0.9, 0.005);
  EXPECT_NEAR(pce_quantile(f2, 0.95, 1'000'000, 11), 2.0 * q, 1e-14);
  EXPECT_THROW(pce_quantile(f, 0.95, 9'999, 11), ArgumentError);
}

TEST(PceParseval, SampleVarianceMatchesCoefficients) {
  const std::size_t d = 3;
  const auto basis = total_degree_basis(d, 4);
  const CounterStream rng(8, "parseval");
  std::vector<double> c(basis.size());
  for (std::size_t a = 0; a < c.size(); ++a) c[a] = rng.symmetric(a) / (1.0 + basis[a].total_degree());
  const PCESurrogate s(InputSpace::standard(d), basis, c);
  const auto v = pce_sample_values(s, 1'000'000, 21);
  const RiskMeasures r = risk_from_samples(v);
  EXPECT_NEAR(r.std_dev * r.std_dev / s.variance(), 1.0, 0.01);
  EXPECT_NEAR(r.mean, s.mean(), 0.01 * std::sqrt(s.variance()));
}
