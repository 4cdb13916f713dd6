#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "gustuq/core.hpp"
#include "gustuq/dimension_reduction.hpp"
#include "gustuq/random.hpp"
#include "oracles.hpp"
#include "poly_oracle.hpp"

using namespace gustuq;
using oracle::PolyOracle;
using oracle::box3;
using oracle::random_coeffs;

namespace {

class ThrowingOracle final : public ModelOracle {
 public:
  QoIRecord evaluate(std::span<const double>) const override { throw std::runtime_error("solver diverged"); }
};

}  // namespace

TEST(NewtonInterpolant, LagrangeAndHermiteMatchData) {
  const std::vector<double> z{-0.9, -0.1, 0.4, 0.8};
  std::vector<double> v, dv;
  for (double x : z) {
    v.push_back(std::sin(2 * x));
    dv.push_back(2 * std::cos(2 * x));
  }
  const auto l = NewtonInterpolant::lagrange(z, v);
  const auto h = NewtonInterpolant::hermite(z, v, dv);
  EXPECT_EQ(l.degree(), 3u);
  EXPECT_EQ(h.degree(), 7u);
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_NEAR(l(z[i]), v[i], 1e-12);
    EXPECT_NEAR(h(z[i]), v[i], 1e-12);
    EXPECT_NEAR(h.derivative(z[i]), dv[i], 1e-12);
  }
  EXPECT_THROW(NewtonInterpolant::lagrange(z, std::vector<double>{1.0}), ArgumentError);
}

TEST(UdrBuild, EvaluationCounts) {
  const InputSpace s = box3();
  for (std::size_t k = 1; k <= 7; ++k) {
    PolyOracle f(s, random_coeffs(3, 2, k));
    const DRBuild u = udr_build(f, s, k);
    EXPECT_EQ(u.evaluations, 3 * k + 1);
    EXPECT_EQ(f.evaluations, 3 * k + 1);
    EXPECT_EQ(f.gradient_calls, 0u);
    PolyOracle g(s, random_coeffs(3, 2, k));
    const DRBuild gu = gudr_build(g, s, k);
    EXPECT_EQ(g.evaluations, 3 * k + 1);
    EXPECT_EQ(g.gradient_calls, 3 * k);
    EXPECT_EQ(gu.gradient_evaluations, 3 * k);
  }
  PolyOracle f(s, random_coeffs(3, 2, 1));
  EXPECT_EQ(udr_build(f, s, 5).evaluations, 16u);
}

TEST(UdrBuild, AdditivePolynomialsAreFixedPoints) {
  const InputSpace s = box3();
  const CounterStream rng(9, "points");
  for (std::size_t k = 1; k <= 6; ++k) {
    PolyOracle udr_f(s, random_coeffs(3, k - 1, 10 + k));
    PolyOracle gudr_f(s, random_coeffs(3, 2 * k - 1, 20 + k));
    const DRBuild u = udr_build(udr_f, s, k);
    const DRBuild g = gudr_build(gudr_f, s, k);
    for (std::size_t i = 0; i < 1000; ++i) {
      const std::vector<double> xi{rng.symmetric(3 * i), rng.symmetric(3 * i + 1), rng.symmetric(3 * i + 2)};
      const double fu = udr_f.value(xi), fg = gudr_f.value(xi);
      ASSERT_NEAR(u[QoI::MaxTipDisplacement].predict_standard(xi), fu, 1e-10 * std::max(1.0, std::abs(fu)));
      ASSERT_NEAR(u[QoI::AvgStrainEnergy].predict_standard(xi), 2.0 * fu, 2e-10 * std::max(1.0, std::abs(fu)));
      ASSERT_NEAR(g[QoI::MaxTipDisplacement].predict_standard(xi), fg, 1e-10 * std::max(1.0, std::abs(fg)));
    }
  }
}

TEST(UdrBuild, CentreIsReproducedExactly) {
  const InputSpace s = box3();
  PolyOracle f(s, random_coeffs(3, 4, 3), 0.7);
  const DRBuild u = udr_build(f, s, 3);
  const auto mid = s.midpoint();
  EXPECT_EQ(u[QoI::MaxTipDisplacement].predict(mid), f.evaluate(mid).max_tip_displacement);
}

TEST(UdrBuild, InteractionTermIsInvisible) {
  const InputSpace s = InputSpace::standard(2);
  PolyOracle f(s, {{0.0}, {0.0}}, 1.0);
  const DRBuild u = udr_build(f, s, 4);
  const CounterStream rng(4, "pts");
  for (std::size_t i = 0; i < 50; ++i) {
    const std::vector<double> xi{rng.symmetric(2 * i), rng.symmetric(2 * i + 1)};
    EXPECT_EQ(u[QoI::MaxTipDisplacement].predict_standard(xi), 0.0);
  }
}

TEST(GudrBuild, CubicFromTwoNodes) {
  const InputSpace s = InputSpace::standard(1);
  PolyOracle f(s, {{0, 0, 0, 1}});
  const DRBuild g = gudr_build(f, s, 2);
  const DRBuild u = udr_build(f, s, 2);
  for (double x = -1.0; x <= 1.0; x += 0.125) {
    EXPECT_NEAR(g[QoI::MaxTipDisplacement].slices[0].interpolant(x), x * x * x, 1e-14);
    EXPECT_NEAR(u[QoI::MaxTipDisplacement].slices[0].interpolant(x), x / 3.0, 1e-14);
  }
  const Moments mg = dr_moments(g[QoI::MaxTipDisplacement]);
  const Moments mu = dr_moments(u[QoI::MaxTipDisplacement]);
  EXPECT_NEAR(mg.mean, 0.0, 1e-15);
  EXPECT_NEAR(mg.std_dev, std::sqrt(oracle::uniform_moment(6)), 1e-10);
  EXPECT_NEAR(mu.std_dev, std::sqrt(oracle::uniform_moment(2) / 9.0), 1e-10);
}

TEST(GudrBuild, LinearFunctionSameAsUdr) {
  const InputSpace s = box3();
  PolyOracle f(s, {{1.0, 2.0}, {0.5, -1.0}, {0.0, 0.25}});
  const DRBuild g = gudr_build(f, s, 3), u = udr_build(f, s, 3);
  const CounterStream rng(5, "lin");
  for (std::size_t i = 0; i < 100; ++i) {
    const std::vector<double> xi{rng.symmetric(3 * i), rng.symmetric(3 * i + 1), rng.symmetric(3 * i + 2)};
    EXPECT_NEAR(g[QoI::MaxTipDisplacement].predict_standard(xi), u[QoI::MaxTipDisplacement].predict_standard(xi), 1e-13);
  }
}

TEST(GudrBuild, NeedsGradientCapability) {
  const InputSpace s = box3();
  PolyOracle f(s, random_coeffs(3, 1, 1), 0.0, false);
  EXPECT_THROW(gudr_build(f, s, 2), CapabilityError);
  EXPECT_NO_THROW(udr_build(f, s, 2));
  ThrowingOracle bad;
  EXPECT_THROW(udr_build(bad, s, 2), OracleError);
}

TEST(DrMoments, AnalyticValues) {
  const InputSpace s = box3();
  PolyOracle c(s, {{4.5}, {0.0}, {0.0}});
  const Moments mc = dr_moments(udr_build(c, s, 3)[QoI::MaxTipDisplacement]);
  EXPECT_NEAR(mc.mean, 4.5, 1e-14);
  EXPECT_NEAR(mc.std_dev, 0.0, 1e-14);

  PolyOracle lin(s, {{0.0, 1.0}, {0.0}, {0.0}});
  const Moments ml = dr_moments(udr_build(lin, s, 2)[QoI::MaxTipDisplacement]);
  EXPECT_NEAR(ml.mean, 0.0, 1e-14);
  EXPECT_NEAR(ml.std_dev, std::sqrt(oracle::uniform_moment(2)), 1e-14);

  for (std::size_t k = 2; k <= 7; ++k) {
    PolyOracle f(s, random_coeffs(3, k - 1, 40 + k));
    const Moments m = dr_moments(udr_build(f, s, k)[QoI::MaxTipDisplacement]);
    EXPECT_NEAR(m.mean, f.analytic_mean(), 1e-10);
    EXPECT_NEAR(m.std_dev, std::sqrt(f.analytic_variance()), 1e-10);
  }
}

TEST(DrMoments, GudrKMatchesUdrTwoK) {
  const InputSpace s = InputSpace::standard(1);
  for (std::size_t k = 1; k <= 4; ++k) {
    PolyOracle f(s, random_coeffs(1, 2 * k - 1, 60 + k));
    const Moments g = dr_moments(gudr_build(f, s, k)[QoI::MaxTipDisplacement]);
    const Moments u = dr_moments(udr_build(f, s, 2 * k)[QoI::MaxTipDisplacement]);
    EXPECT_NEAR(g.mean, u.mean, 1e-10);
    EXPECT_NEAR(g.std_dev, u.std_dev, 1e-10);
    EXPECT_NEAR(g.mean, f.analytic_mean(), 1e-10);
  }
}

TEST(DrQuantile, ConstantAndUniform) {
  const InputSpace s = box3();
  PolyOracle c(s, {{-2.0}, {0.0}, {0.0}});
  const UDRApprox ac = udr_build(c, s, 2)[QoI::MaxTipDisplacement];
  EXPECT_NEAR(dr_quantile(ac, 0.95, 10'000, 1), -2.0, 1e-13);
  EXPECT_NEAR(dr_quantile(ac, 0.5, 10'000, 1), -2.0, 1e-13);

  PolyOracle lin(s, {{0.0, 1.0}, {0.0}, {0.0}});
  EXPECT_NEAR(dr_quantile(udr_build(lin, s, 3)[QoI::MaxTipDisplacement], 0.95, 1'000'000, 2), 0.9, 0.005);
}

TEST(DrToPce, ReproducesApproximation) {
  const InputSpace s = box3();
  PolyOracle f(s, random_coeffs(3, 5, 7), 0.3);
  for (const DRBuild& b : {udr_build(f, s, 4), gudr_build(f, s, 3)}) {
    const UDRApprox& a = b[QoI::AvgStrainEnergy];
    const PCESurrogate p = dr_to_pce(a);
    const CounterStream rng(8, "pce");
    for (std::size_t i = 0; i < 100; ++i) {
      const std::vector<double> xi{rng.symmetric(3 * i), rng.symmetric(3 * i + 1), rng.symmetric(3 * i + 2)};
      EXPECT_NEAR(p.predict_standard(xi), a.predict_standard(xi), 1e-10);
    }
    const Moments m = dr_moments(a);
    EXPECT_NEAR(p.mean(), m.mean, 1e-12);
    EXPECT_NEAR(std::sqrt(p.variance()), m.std_dev, 1e-12);
  }
}
