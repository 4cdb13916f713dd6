#pragma once

// Brute-force Monte Carlo directly on the model oracle.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "gustuq/core.hpp"
#include "gustuq/errors.hpp"
#include "gustuq/random.hpp"

namespace gustuq {

struct MCResult {
  std::array<RiskMeasures, kQoICount> risk;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::array<double, kQoICount> mean_standard_error{};

  const RiskMeasures& operator[](QoI q) const { return risk[static_cast<std::size_t>(q)]; }
};

/// Sample i, dimension j uses stream index i*d + j, so the first n draws of a
/// 2n run are exactly the draws of an n run.
inline std::vector<double> mc_draw(const InputSpace& space, std::size_t i, const CounterStream& stream) {
  const std::size_t d = space.dimension();
  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& in = space[j];
    x[j] = in.lower + stream.uniform(i * d + j) * (in.upper - in.lower);
  }
  return x;
}

inline MCResult mc_estimate(const ModelOracle& oracle, const InputSpace& space, std::size_t n, std::uint64_t seed,
                            double p = 0.95) {
  if (n < 2) throw ArgumentError("Monte Carlo needs n >= 2");
  const CounterStream stream(seed, "monte_carlo");
  std::array<std::vector<double>, kQoICount> values;
  for (auto& v : values) v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = mc_draw(space, i, stream);
    QoIRecord f;
    try {
      f = oracle.evaluate(x);
    } catch (const std::exception& e) {
      throw OracleError("oracle failed at Monte Carlo sample " + std::to_string(i) + ": " + e.what());
    }
    for (QoI q : kAllQoIs) values[static_cast<std::size_t>(q)][i] = f[q];
  }
  MCResult r;
  r.n = n;
  r.seed = seed;
  for (QoI q : kAllQoIs) {
    const auto qi = static_cast<std::size_t>(q);
    r.risk[qi] = risk_from_samples(values[qi], p);
    r.mean_standard_error[qi] = r.risk[qi].std_dev / std::sqrt(static_cast<double>(n));
  }
  return r;
}

}  // namespace gustuq
