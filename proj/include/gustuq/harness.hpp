#pragma once

// Study harness: ground truth, convergence sweeps over evaluation budgets, and
// PDF histogram export for the gust benchmark (or a constant stand-in model).

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gustuq/core.hpp"
#include "gustuq/dimension_reduction.hpp"
#include "gustuq/errors.hpp"
#include "gustuq/gust.hpp"
#include "gustuq/json_io.hpp"
#include "gustuq/kriging.hpp"
#include "gustuq/monte_carlo.hpp"
#include "gustuq/pce.hpp"
#include "gustuq/random.hpp"

namespace gustuq {

enum class Method { Nipc, Kriging, MonteCarlo, Udr, Gudr };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Nipc: return "nipc";
    case Method::Kriging: return "kriging";
    case Method::MonteCarlo: return "mc";
    case Method::Udr: return "udr";
    case Method::Gudr: return "gudr";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::Nipc, Method::Kriging, Method::MonteCarlo, Method::Udr, Method::Gudr})
    if (s == method_name(m)) return m;
  throw ConfigError("unknown method '" + std::string(s) + "' (expected nipc, kriging, mc, udr or gudr)");
}

enum class Measure { Mean, StdDev, P95 };

inline constexpr std::array<Measure, 3> kAllMeasures{Measure::Mean, Measure::StdDev, Measure::P95};

inline const char* measure_name(Measure m) {
  switch (m) {
    case Measure::Mean: return "mean";
    case Measure::StdDev: return "std_dev";
    case Measure::P95: return "p95";
  }
  return "?";
}

inline double measure_of(const RiskMeasures& r, Measure m) {
  switch (m) {
    case Measure::Mean: return r.mean;
    case Measure::StdDev: return r.std_dev;
    case Measure::P95: return r.p95;
  }
  return 0.0;
}

struct GroundTruthSpec {
  std::size_t kriging_samples = 500;
  std::size_t surrogate_samples = 1'000'000;
  std::size_t crosscheck_samples = 100'000;
  double crosscheck_sigmas = 3.0;
};

struct PdfSpec {
  std::size_t bins = 100;
  std::size_t samples = 1'000'000;
};

struct StudyConfig {
  InputSpace space = gust_input_space();
  BenchmarkConstants model;
  std::optional<QoIRecord> constant_model;  // replaces the gust benchmark when set
  std::vector<Method> methods{Method::Nipc, Method::Kriging, Method::MonteCarlo, Method::Udr, Method::Gudr};
  std::vector<std::size_t> budgets{8, 16, 32, 64, 128, 256};
  std::vector<std::size_t> nipc_degrees{1, 2, 3, 4, 5, 6};
  std::vector<std::size_t> udr_orders{2, 3, 4, 5, 6, 7};
  std::vector<std::size_t> gudr_orders{2, 3, 4, 5, 6, 7};
  GroundTruthSpec ground_truth;
  PdfSpec pdf;
  std::size_t surrogate_samples = 1'000'000;
  double quantile = 0.95;
  std::uint64_t seed = 20250101;
  bool timing = true;

  void validate() const {
    auto increasing = [](const std::vector<std::size_t>& v, const char* what) {
      if (v.empty()) throw ConfigError(std::string(what) + " must not be empty");
      for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw ConfigError(std::string(what) + " must be strictly increasing");
    };
    increasing(budgets, "budgets");
    increasing(nipc_degrees, "nipc_degrees");
    increasing(udr_orders, "udr_orders");
    increasing(gudr_orders, "gudr_orders");
    if (budgets.front() < 2) throw ConfigError("budgets must be >= 2");
    if (udr_orders.front() < 1 || gudr_orders.front() < 1) throw ConfigError("dimension-reduction orders must be >= 1");
    if (!(quantile > 0.0 && quantile < 1.0)) throw ConfigError("quantile must lie in (0, 1)");
    if (surrogate_samples < 10'000 || ground_truth.surrogate_samples < 10'000)
      throw ConfigError("surrogate sample counts must be >= 10^4");
    if (ground_truth.kriging_samples < space.dimension() + 2) throw ConfigError("ground-truth kriging needs >= d + 2 samples");
    if (ground_truth.crosscheck_samples < 2) throw ConfigError("cross-check needs >= 2 samples");
    if (pdf.bins < 1 || pdf.samples < 2) throw ConfigError("pdf needs >= 1 bin and >= 2 samples");
    if (methods.empty()) throw ConfigError("method list must not be empty");
  }
};

/// Independent seed for a named sub-task of a study.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) { return CounterStream(seed, label).key(); }

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::size_t level) {
  return CounterStream(derive_seed(seed, label), "level").bits(level);
}

// ---------------------------------------------------------------------------
// Configuration file

inline json to_json(const BenchmarkConstants& c) {
  return {{"modal_mass", c.wing.modal_mass},
          {"natural_frequency", c.wing.natural_frequency},
          {"reference_area", c.wing.reference_area},
          {"lift_curve_slope", c.wing.lift_curve_slope},
          {"mode_tip_value", c.wing.mode_tip_value},
          {"damping_ratio", c.wing.damping_ratio},
          {"air_density", c.air_density},
          {"onset_time", c.onset_time},
          {"time_step", c.simulation.time_step},
          {"final_time", c.simulation.final_time},
          {"newmark_beta", c.simulation.newmark_beta},
          {"newmark_gamma", c.simulation.newmark_gamma}};
}

namespace detail {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline BenchmarkConstants benchmark_constants_from_json(const json& j, BenchmarkConstants c = {}) {
  detail::check_keys(j,
                     {"modal_mass", "natural_frequency", "reference_area", "lift_curve_slope", "mode_tip_value",
                      "damping_ratio", "air_density", "onset_time", "time_step", "final_time", "newmark_beta",
                      "newmark_gamma", "constant"},
                     "model");
  detail::read_opt(j, "modal_mass", c.wing.modal_mass);
  detail::read_opt(j, "natural_frequency", c.wing.natural_frequency);
  detail::read_opt(j, "reference_area", c.wing.reference_area);
  detail::read_opt(j, "lift_curve_slope", c.wing.lift_curve_slope);
  detail::read_opt(j, "mode_tip_value", c.wing.mode_tip_value);
  detail::read_opt(j, "damping_ratio", c.wing.damping_ratio);
  detail::read_opt(j, "air_density", c.air_density);
  detail::read_opt(j, "onset_time", c.onset_time);
  detail::read_opt(j, "time_step", c.simulation.time_step);
  detail::read_opt(j, "final_time", c.simulation.final_time);
  detail::read_opt(j, "newmark_beta", c.simulation.newmark_beta);
  detail::read_opt(j, "newmark_gamma", c.simulation.newmark_gamma);
  return c;
}

inline json to_json(const StudyConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  json model = to_json(c.model);
  if (c.constant_model)
    model["constant"] = {{"max_tip_displacement", c.constant_model->max_tip_displacement},
                         {"avg_strain_energy", c.constant_model->avg_strain_energy}};
  return {{"inputs", to_json(c.space)},
          {"model", model},
          {"methods", methods},
          {"budgets", c.budgets},
          {"nipc_degrees", c.nipc_degrees},
          {"udr_orders", c.udr_orders},
          {"gudr_orders", c.gudr_orders},
          {"ground_truth",
           {{"kriging_samples", c.ground_truth.kriging_samples},
            {"surrogate_samples", c.ground_truth.surrogate_samples},
            {"crosscheck_samples", c.ground_truth.crosscheck_samples},
            {"crosscheck_sigmas", c.ground_truth.crosscheck_sigmas}}},
          {"pdf", {{"bins", c.pdf.bins}, {"samples", c.pdf.samples}}},
          {"surrogate_samples", c.surrogate_samples},
          {"quantile", c.quantile},
          {"seed", c.seed},
          {"timing", c.timing}};
}

/// Parses a study configuration; absent keys keep their defaults.
inline StudyConfig study_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  detail::check_keys(j,
                     {"inputs", "model", "methods", "budgets", "nipc_degrees", "udr_orders", "gudr_orders",
                      "ground_truth", "pdf", "surrogate_samples", "quantile", "seed", "timing"},
                     "configuration");
  StudyConfig c;
  try {
    if (j.contains("inputs")) c.space = input_space_from_json(j.at("inputs"));
    if (j.contains("model")) {
      const auto& m = j.at("model");
      c.model = benchmark_constants_from_json(m);
      if (m.contains("constant")) {
        const auto& k = m.at("constant");
        if (k.is_number()) {
          const double v = k.get<double>();
          c.constant_model = QoIRecord{v, v};
        } else {
          c.constant_model = QoIRecord{k.at("max_tip_displacement").get<double>(), k.at("avg_strain_energy").get<double>()};
        }
      }
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    detail::read_opt(j, "budgets", c.budgets);
    detail::read_opt(j, "nipc_degrees", c.nipc_degrees);
    detail::read_opt(j, "udr_orders", c.udr_orders);
    detail::read_opt(j, "gudr_orders", c.gudr_orders);
    if (j.contains("ground_truth")) {
      const auto& g = j.at("ground_truth");
      detail::check_keys(g, {"kriging_samples", "surrogate_samples", "crosscheck_samples", "crosscheck_sigmas"},
                         "ground_truth");
      detail::read_opt(g, "kriging_samples", c.ground_truth.kriging_samples);
      detail::read_opt(g, "surrogate_samples", c.ground_truth.surrogate_samples);
      detail::read_opt(g, "crosscheck_samples", c.ground_truth.crosscheck_samples);
      detail::read_opt(g, "crosscheck_sigmas", c.ground_truth.crosscheck_sigmas);
    }
    if (j.contains("pdf")) {
      const auto& p = j.at("pdf");
      detail::check_keys(p, {"bins", "samples"}, "pdf");
      detail::read_opt(p, "bins", c.pdf.bins);
      detail::read_opt(p, "samples", c.pdf.samples);
    }
    detail::read_opt(j, "surrogate_samples", c.surrogate_samples);
    detail::read_opt(j, "quantile", c.quantile);
    detail::read_opt(j, "seed", c.seed);
    detail::read_opt(j, "timing", c.timing);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  c.validate();
  return c;
}

inline StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return study_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Oracles

class ConstantOracle final : public ModelOracle {
 public:
  ConstantOracle(QoIRecord value, std::size_t dimension) : value_(value), dimension_(dimension) {}
  QoIRecord evaluate(std::span<const double>) const override { return value_; }
  bool has_gradient() const override { return true; }
  QoIGradient gradient(std::span<const double>) const override {
    return QoIGradient::Zero(2, static_cast<Eigen::Index>(dimension_));
  }

 private:
  QoIRecord value_;
  std::size_t dimension_;
};

/// Counts oracle work. Each gradient call is charged as one additional
/// evaluation when reporting budgets.
class CountingOracle final : public ModelOracle {
 public:
  explicit CountingOracle(const ModelOracle& inner) : inner_(inner) {}

  QoIRecord evaluate(std::span<const double> x) const override {
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    return inner_.evaluate(x);
  }
  bool has_gradient() const override { return inner_.has_gradient(); }
  QoIGradient gradient(std::span<const double> x) const override {
    gradients_.fetch_add(1, std::memory_order_relaxed);
    return inner_.gradient(x);
  }

  std::size_t evaluations() const { return evaluations_.load(); }
  std::size_t gradients() const { return gradients_.load(); }
  std::size_t budget() const { return evaluations() + gradients(); }

 private:
  const ModelOracle& inner_;
  mutable std::atomic<std::size_t> evaluations_{0};
  mutable std::atomic<std::size_t> gradients_{0};
};

inline std::unique_ptr<ModelOracle> make_oracle(const StudyConfig& c) {
  if (c.constant_model) return std::make_unique<ConstantOracle>(*c.constant_model, c.space.dimension());
  return std::make_unique<GustBenchmark>(c.space, c.model);
}

// ---------------------------------------------------------------------------
// Methods

using RiskPair = std::array<RiskMeasures, kQoICount>;

struct MethodRun {
  RiskPair risk;
  std::size_t budget = 0;
};

/// Level values swept for a method: polynomial degree (nipc), sample count
/// (kriging, mc) or nodes per dimension (udr, gudr).
inline const std::vector<std::size_t>& method_levels(Method m, const StudyConfig& c) {
  switch (m) {
    case Method::Nipc: return c.nipc_degrees;
    case Method::Udr: return c.udr_orders;
    case Method::Gudr: return c.gudr_orders;
    default: return c.budgets;
  }
}

/// Oracle evaluations a method plans to spend at a level.
inline std::size_t planned_budget(Method m, std::size_t level, std::size_t d) {
  switch (m) {
    case Method::Nipc: return pce_required_samples(d, static_cast<unsigned>(level));
    case Method::Udr: return d * level + 1;
    case Method::Gudr: return 2 * d * level + 1;
    default: return level;
  }
}

namespace detail {

inline std::array<std::vector<double>, kQoICount> evaluate_design(const ModelOracle& oracle, const PointSet& physical) {
  std::array<std::vector<double>, kQoICount> values;
  for (auto& v : values) v.resize(static_cast<std::size_t>(physical.rows()));
  for (Eigen::Index i = 0; i < physical.rows(); ++i) {
    QoIRecord f;
    try {
      f = oracle.evaluate(row_span(physical, i));
    } catch (const std::exception& e) {
      throw OracleError("oracle failed at design point " + std::to_string(i) + ": " + e.what());
    }
    for (QoI q : kAllQoIs) values[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)] = f[q];
  }
  return values;
}

}  // namespace detail

/// Runs one method at one level against `oracle`. The reported budget is the
/// oracle work actually consumed.
inline MethodRun run_method(Method m, std::size_t level, const ModelOracle& oracle, const StudyConfig& c,
                            std::uint64_t seed) {
  CountingOracle counter(oracle);
  const InputSpace& space = c.space;
  const std::size_t d = space.dimension();
  MethodRun run;
  switch (m) {
    case Method::Nipc: {
      const auto degree = static_cast<unsigned>(level);
      const PointSet design = latin_hypercube(pce_required_samples(d, degree), space, derive_seed(seed, "design"));
      const auto values = detail::evaluate_design(counter, design);
      const PointSet standard = to_standard(design, space);
      for (QoI q : kAllQoIs) {
        const auto qi = static_cast<std::size_t>(q);
        const auto pce = fit_regression(space, standard, values[qi], degree);
        const auto mom = pce_moments(pce);
        run.risk[qi] = {mom.mean, mom.std_dev,
                        pce_quantile(pce, c.quantile, c.surrogate_samples, derive_seed(seed, "surrogate"))};
      }
      break;
    }
    case Method::Kriging: {
      const PointSet design = latin_hypercube(level, space, derive_seed(seed, "design"));
      const auto values = detail::evaluate_design(counter, design);
      const PointSet standard = to_standard(design, space);
      for (QoI q : kAllQoIs) {
        const auto qi = static_cast<std::size_t>(q);
        const auto model = kriging_fit(standard, values[qi]);
        run.risk[qi] = kriging_risk(model, c.quantile, c.surrogate_samples, derive_seed(seed, "surrogate"));
      }
      break;
    }
    case Method::MonteCarlo: {
      const auto r = mc_estimate(counter, space, level, seed, c.quantile);
      run.risk = r.risk;
      break;
    }
    case Method::Udr:
    case Method::Gudr: {
      const auto build = m == Method::Udr ? udr_build(counter, space, level) : gudr_build(counter, space, level);
      for (QoI q : kAllQoIs) {
        const auto qi = static_cast<std::size_t>(q);
        const auto mom = dr_moments(build.approx[qi]);
        run.risk[qi] = {mom.mean, mom.std_dev,
                        dr_quantile(build.approx[qi], c.quantile, c.surrogate_samples, derive_seed(seed, "surrogate"))};
      }
      break;
    }
  }
  run.budget = counter.budget();
  return run;
}

// ---------------------------------------------------------------------------
// Ground truth

struct CrossCheck {
  std::size_t samples = 0;
  std::array<double, kQoICount> mean{}, std_dev{}, mean_se{}, std_se{};
};

struct GroundTruth {
  RiskPair risk;
  std::array<KrigingModel, kQoICount> surrogates;
  CrossCheck crosscheck;
  json fingerprint;

  const RiskMeasures& operator[](QoI q) const { return risk[static_cast<std::size_t>(q)]; }
};

/// The configuration fields a ground truth depends on.
inline json truth_fingerprint(const StudyConfig& c) {
  const json full = to_json(c);
  return {{"inputs", full["inputs"]},
          {"model", full["model"]},
          {"ground_truth", full["ground_truth"]},
          {"quantile", c.quantile},
          {"seed", c.seed}};
}

/// Direct Monte Carlo reference for the fidelity check: sample moments with
/// standard errors of the mean and of the standard deviation.
inline CrossCheck direct_crosscheck(const ModelOracle& oracle, const InputSpace& space, std::size_t n,
                                    std::uint64_t seed) {
  const CounterStream stream(seed, "monte_carlo");
  std::array<std::vector<double>, kQoICount> values;
  for (auto& v : values) v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const QoIRecord f = oracle.evaluate(mc_draw(space, i, stream));
    for (QoI q : kAllQoIs) values[static_cast<std::size_t>(q)][i] = f[q];
  }
  CrossCheck cc;
  cc.samples = n;
  const double nd = static_cast<double>(n);
  for (std::size_t qi = 0; qi < kQoICount; ++qi) {
    const RiskMeasures r = risk_from_samples(values[qi], 0.5);
    double m4 = 0.0;
    for (double v : values[qi]) m4 += std::pow(v - r.mean, 4);
    m4 /= nd;
    const double var = r.std_dev * r.std_dev;
    cc.mean[qi] = r.mean;
    cc.std_dev[qi] = r.std_dev;
    cc.mean_se[qi] = r.std_dev / std::sqrt(nd);
    // Delta method: Var(s^2) ~ (mu_4 - sigma^4) / n, ds = d(s^2) / (2 s).
    cc.std_se[qi] = r.std_dev > 0.0 ? std::sqrt(std::max(m4 - var * var, 0.0) / nd) / (2.0 * r.std_dev) : 0.0;
  }
  return cc;
}

/// Kriging on an LHS design, risk measures from dense surrogate sampling, and a
/// direct Monte Carlo fidelity check on mean and standard deviation.
inline GroundTruth run_ground_truth(const StudyConfig& c) {
  c.validate();
  const auto oracle = make_oracle(c);
  const InputSpace& space = c.space;
  GroundTruth gt;
  gt.fingerprint = truth_fingerprint(c);
  const PointSet design = latin_hypercube(c.ground_truth.kriging_samples, space, derive_seed(c.seed, "truth/design"));
  const auto values = detail::evaluate_design(*oracle, design);
  const PointSet standard = to_standard(design, space);
  for (QoI q : kAllQoIs) {
    const auto qi = static_cast<std::size_t>(q);
    gt.surrogates[qi] = kriging_fit(standard, values[qi]);
    gt.risk[qi] = kriging_risk(gt.surrogates[qi], c.quantile, c.ground_truth.surrogate_samples,
                               derive_seed(c.seed, "truth/surrogate"));
  }

  gt.crosscheck = direct_crosscheck(*oracle, space, c.ground_truth.crosscheck_samples, derive_seed(c.seed, "truth/crosscheck"));
  const double k = c.ground_truth.crosscheck_sigmas;
  for (QoI q : kAllQoIs) {
    const auto qi = static_cast<std::size_t>(q);
    const auto& cc = gt.crosscheck;
    const double slack = 1e-12 * std::max(1.0, std::abs(cc.mean[qi]));
    const double dm = std::abs(gt.risk[qi].mean - cc.mean[qi]);
    const double ds = std::abs(gt.risk[qi].std_dev - cc.std_dev[qi]);
    if (dm > k * cc.mean_se[qi] + slack || ds > k * cc.std_se[qi] + slack) {
      char buf[400];
      std::snprintf(buf, sizeof buf,
                    "ground truth for %s disagrees with %zu-sample direct Monte Carlo: mean %.6g vs %.6g (SE %.3g), "
                    "std %.6g vs %.6g (SE %.3g); increase ground_truth.kriging_samples",
                    qoi_name(q), cc.samples, gt.risk[qi].mean, cc.mean[qi], cc.mean_se[qi], gt.risk[qi].std_dev,
                    cc.std_dev[qi], cc.std_se[qi]);
      throw FidelityError(buf);
    }
  }
  return gt;
}

inline json to_json(const GroundTruth& gt) {
  json risk, surrogates, cc;
  for (QoI q : kAllQoIs) {
    const auto qi = static_cast<std::size_t>(q);
    risk[qoi_name(q)] = to_json(gt.risk[qi]);
    surrogates[qoi_name(q)] = to_json(gt.surrogates[qi]);
    cc[qoi_name(q)] = {{"mean", gt.crosscheck.mean[qi]},
                       {"std_dev", gt.crosscheck.std_dev[qi]},
                       {"mean_standard_error", gt.crosscheck.mean_se[qi]},
                       {"std_dev_standard_error", gt.crosscheck.std_se[qi]}};
  }
  cc["samples"] = gt.crosscheck.samples;
  return {{"config", gt.fingerprint}, {"risk", risk}, {"crosscheck", cc}, {"surrogates", surrogates}};
}

inline GroundTruth ground_truth_from_json(const json& j) {
  GroundTruth gt;
  gt.fingerprint = j.at("config");
  for (QoI q : kAllQoIs) {
    const auto qi = static_cast<std::size_t>(q);
    gt.risk[qi] = risk_from_json(j.at("risk").at(qoi_name(q)));
    gt.surrogates[qi] = kriging_from_json(j.at("surrogates").at(qoi_name(q)));
    const auto& cc = j.at("crosscheck").at(qoi_name(q));
    gt.crosscheck.mean[qi] = cc.at("mean").get<double>();
    gt.crosscheck.std_dev[qi] = cc.at("std_dev").get<double>();
    gt.crosscheck.mean_se[qi] = cc.at("mean_standard_error").get<double>();
    gt.crosscheck.std_se[qi] = cc.at("std_dev_standard_error").get<double>();
  }
  gt.crosscheck.samples = j.at("crosscheck").at("samples").get<std::size_t>();
  return gt;
}

/// Loads `path` if it holds a ground truth for the same configuration;
/// otherwise computes one and writes it to `path`.
inline GroundTruth load_or_compute_ground_truth(const StudyConfig& c, const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    json j;
    try {
      in >> j;
      if (j.at("config") == truth_fingerprint(c)) return ground_truth_from_json(j);
    } catch (const std::exception&) {
      // stale or unreadable cache: recompute
    }
  }
  GroundTruth gt = run_ground_truth(c);
  std::ofstream out(path);
  out << to_json(gt).dump(2) << '\n';
  return gt;
}

// ---------------------------------------------------------------------------
// Convergence study

struct ConvergenceRecord {
  Method method = Method::Nipc;
  QoI qoi = QoI::MaxTipDisplacement;
  Measure measure = Measure::Mean;
  std::size_t level = 0;
  std::size_t budget = 0;
  double estimate = 0.0;
  double rel_error = 0.0;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string failure;
};

inline double relative_error(double estimate, double truth) {
  if (truth == 0.0) return std::abs(estimate);
  return std::abs(estimate - truth) / std::abs(truth);
}

/// Every method at every level of its sweep, against a fixed ground truth.
/// A failing cell is recorded with its failure message and the sweep continues.
inline std::vector<ConvergenceRecord> run_convergence(const StudyConfig& c, const GroundTruth& truth) {
  c.validate();
  const auto oracle = make_oracle(c);
  std::vector<ConvergenceRecord> records;
  for (Method m : c.methods) {
    for (std::size_t level : method_levels(m, c)) {
      const auto t0 = std::chrono::steady_clock::now();
      MethodRun run;
      std::string failure;
      try {
        run = run_method(m, level, *oracle, c, derive_seed(c.seed, method_name(m), level));
      } catch (const std::exception& e) {
        failure = e.what();
        run.budget = planned_budget(m, level, c.space.dimension());
      }
      const double wall =
          c.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() : 0.0;
      for (QoI q : kAllQoIs) {
        for (Measure meas : kAllMeasures) {
          ConvergenceRecord r;
          r.method = m;
          r.qoi = q;
          r.measure = meas;
          r.level = level;
          r.budget = run.budget;
          r.wall_time_s = wall;
          if (failure.empty()) {
            r.estimate = measure_of(run.risk[static_cast<std::size_t>(q)], meas);
            r.rel_error = relative_error(r.estimate, measure_of(truth[q], meas));
            if (!std::isfinite(r.estimate) || !std::isfinite(r.rel_error)) {
              r.failed = true;
              r.failure = "non-finite estimate";
            }
          } else {
            r.failed = true;
            r.failure = failure;
          }
          records.push_back(std::move(r));
        }
      }
    }
  }
  return records;
}

namespace detail {

inline std::string format_number(double v, const char* fmt = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace detail

/// CSV with columns method, qoi, measure, budget, estimate, rel_error,
/// wall_time_s, status. Failed cells leave estimate and rel_error empty and
/// carry the failure in status.
inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
  os << "method,qoi,measure,budget,estimate,rel_error,wall_time_s,status\n";
  for (const auto& r : records) {
    os << method_name(r.method) << ',' << qoi_name(r.qoi) << ',' << measure_name(r.measure) << ',' << r.budget << ',';
    if (r.failed)
      os << ",,";
    else
      os << detail::format_number(r.estimate) << ',' << detail::format_number(r.rel_error) << ',';
    os << detail::format_number(r.wall_time_s, "%.6f") << ','
       << (r.failed ? detail::csv_field("failed: " + r.failure) : std::string("ok")) << '\n';
  }
}

inline json to_json(const std::vector<ConvergenceRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json e = {{"method", method_name(r.method)},
              {"qoi", qoi_name(r.qoi)},
              {"measure", measure_name(r.measure)},
              {"level", r.level},
              {"budget", r.budget},
              {"wall_time_s", r.wall_time_s},
              {"status", r.failed ? "failed" : "ok"}};
    if (r.failed) {
      e["failure"] = r.failure;
    } else {
      e["estimate"] = r.estimate;
      e["rel_error"] = r.rel_error;
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// PDF export

struct HistogramBin {
  double center = 0.0;
  double density = 0.0;
};

/// Density-normalized histogram over [min, max] of the sample. A degenerate
/// (constant) sample yields one bin of unit width holding all the mass.
inline std::vector<HistogramBin> density_histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw ArgumentError("histogram of an empty sample");
  if (bins == 0) throw ArgumentError("histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return {{lo, 1.0}};
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, bins - 1)]++;
  }
  std::vector<HistogramBin> out(bins);
  const double norm = 1.0 / (static_cast<double>(values.size()) * width);
  for (std::size_t b = 0; b < bins; ++b)
    out[b] = {lo + (static_cast<double>(b) + 0.5) * width, static_cast<double>(counts[b]) * norm};
  return out;
}

/// Histograms of each ground-truth surrogate under the input distribution.
inline std::array<std::vector<HistogramBin>, kQoICount> export_pdf_data(
    const std::array<KrigingModel, kQoICount>& surrogates, std::size_t n_samples, std::size_t bins, std::uint64_t seed) {
  std::array<std::vector<HistogramBin>, kQoICount> out;
  for (std::size_t qi = 0; qi < kQoICount; ++qi)
    out[qi] = density_histogram(kriging_sample_values(surrogates[qi], n_samples, seed), bins);
  return out;
}

inline void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& h) {
  os << "bin_center,density\n";
  for (const auto& b : h) os << detail::format_number(b.center, "%.17g") << ',' << detail::format_number(b.density, "%.17g") << '\n';
}

}  // namespace gustuq
