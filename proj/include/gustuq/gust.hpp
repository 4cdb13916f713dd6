#pragma once

// Reduced-order gust benchmark: a single-mode cantilever-wing oscillator
//
//   m q'' + c q' + k q = Q(t),   Q(t) = 1/2 rho V_inf S C_La V_g(t)
//
// forced by a one-minus-cosine vertical gust and integrated with Newmark-beta.
// Parameter gradients come from forward sensitivity equations integrated with
// the same scheme, so they are exact derivatives of the discrete QoIs.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gustuq/core.hpp"
#include "gustuq/errors.hpp"

namespace gustuq {

struct GustProfile {
  double peak_velocity = 10.0;  // V_p, m/s
  double gust_length = 6.0;     // l_g, m
  double onset_time = 0.1;      // T_0, s

  void validate() const {
    if (!(peak_velocity >= 0.0)) throw ConfigError("gust peak velocity must be >= 0");
    if (!(gust_length > 0.0)) throw ConfigError("gust length must be > 0");
    if (!(onset_time >= 0.0)) throw ConfigError("gust onset time must be >= 0");
  }
};

struct FlightCondition {
  double freestream_velocity = 50.0;  // V_inf, m/s
  double air_density = 1.225;         // kg/m^3

  void validate() const {
    if (!(freestream_velocity > 0.0)) throw ConfigError("freestream velocity must be > 0");
    if (!(air_density > 0.0)) throw ConfigError("air density must be > 0");
  }
};

struct WingModel {
  double modal_mass = 1000.0;                         // kg
  double natural_frequency = 1.5;                     // Hz
  double reference_area = 8.0;                        // m^2
  double lift_curve_slope = 2.0 * std::numbers::pi;  // 1/rad
  double mode_tip_value = 1.0;
  double damping_ratio = 0.0;

  double stiffness() const {
    const double omega = 2.0 * std::numbers::pi * natural_frequency;
    return modal_mass * omega * omega;
  }
  double damping() const { return 2.0 * damping_ratio * std::sqrt(stiffness() * modal_mass); }

  void validate() const {
    if (!(modal_mass > 0.0)) throw ConfigError("modal mass must be > 0");
    if (!(natural_frequency > 0.0)) throw ConfigError("natural frequency must be > 0");
    if (!(reference_area > 0.0)) throw ConfigError("reference area must be > 0");
    if (!(lift_curve_slope > 0.0)) throw ConfigError("lift curve slope must be > 0");
    if (!(mode_tip_value > 0.0)) throw ConfigError("mode tip value must be > 0");
    if (!(damping_ratio >= 0.0)) throw ConfigError("damping ratio must be >= 0");
  }
};

struct SimulationConfig {
  double time_step = 0.01;  // s
  double final_time = 2.0;  // s
  double newmark_beta = 0.25;
  double newmark_gamma = 0.5;

  /// floor(T_f / dt) + 1, tolerant of T_f being a representation-error away
  /// from a multiple of dt.
  std::size_t step_count() const {
    return static_cast<std::size_t>(std::floor(final_time / time_step + 1e-9)) + 1;
  }

  void validate() const {
    if (!(time_step > 0.0)) throw ConfigError("time step must be > 0");
    if (!(final_time >= 0.0)) throw ConfigError("final time must be >= 0");
    if (!(newmark_beta > 0.0)) throw ConfigError("newmark beta must be > 0");
    if (!(newmark_gamma >= 0.0)) throw ConfigError("newmark gamma must be >= 0");
  }
};

struct TimeHistory {
  std::vector<double> times;
  std::vector<double> modal_coordinate;
  std::vector<double> modal_velocity;
  std::vector<double> tip_displacement;
  std::vector<double> strain_energy;

  std::size_t size() const noexcept { return times.size(); }
};

/// One-minus-cosine vertical gust velocity; zero outside the open window
/// (T_0, T_0 + l_g / V_inf).
inline double gust_velocity(double t, const GustProfile& gust, double freestream_velocity) {
  const double elapsed = t - gust.onset_time;
  const double duration = gust.gust_length / freestream_velocity;
  if (!(elapsed > 0.0 && elapsed < duration)) return 0.0;
  const double phase = 2.0 * std::numbers::pi * elapsed * freestream_velocity / gust.gust_length;
  return 0.5 * gust.peak_velocity * (1.0 - std::cos(phase));
}

/// Generalized force per unit gust velocity: Q = lift_factor * V_g.
inline double lift_factor(const FlightCondition& flight, const WingModel& wing) {
  return 0.5 * flight.air_density * flight.freestream_velocity * wing.reference_area * wing.lift_curve_slope;
}

namespace detail {

struct NewmarkState {
  std::vector<double> q, v, a;
};

// Newmark-beta for the scalar oscillator with the force sampled on the time grid.
// Zero initial displacement and velocity.
inline NewmarkState newmark(std::span<const double> force, const WingModel& wing, const SimulationConfig& cfg) {
  const std::size_t n = force.size();
  const double m = wing.modal_mass;
  const double c = wing.damping();
  const double k = wing.stiffness();
  const double dt = cfg.time_step;
  const double beta = cfg.newmark_beta;
  const double gamma = cfg.newmark_gamma;

  const double a0 = 1.0 / (beta * dt * dt);
  const double a1 = gamma / (beta * dt);
  const double a2 = 1.0 / (beta * dt);
  const double a3 = 1.0 / (2.0 * beta) - 1.0;
  const double a4 = gamma / beta - 1.0;
  const double a5 = dt * (gamma / (2.0 * beta) - 1.0);
  const double k_eff = k + a0 * m + a1 * c;

  NewmarkState s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (n == 0) return s;
  s.a[0] = force[0] / m;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double rhs = force[i + 1] + m * (a0 * s.q[i] + a2 * s.v[i] + a3 * s.a[i]) +
                       c * (a1 * s.q[i] + a4 * s.v[i] + a5 * s.a[i]);
    s.q[i + 1] = rhs / k_eff;
    s.a[i + 1] = a0 * (s.q[i + 1] - s.q[i]) - a2 * s.v[i] - a3 * s.a[i];
    s.v[i + 1] = s.v[i] + dt * ((1.0 - gamma) * s.a[i] + gamma * s.a[i + 1]);
  }
  return s;
}

inline TimeHistory assemble_history(const NewmarkState& s, const WingModel& wing, const SimulationConfig& cfg) {
  const std::size_t n = s.q.size();
  const double k = wing.stiffness();
  TimeHistory h;
  h.times.resize(n);
  h.modal_coordinate = s.q;
  h.modal_velocity = s.v;
  h.tip_displacement.resize(n);
  h.strain_energy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    h.times[i] = static_cast<double>(i) * cfg.time_step;
    h.tip_displacement[i] = wing.mode_tip_value * s.q[i];
    h.strain_energy[i] = 0.5 * k * s.q[i] * s.q[i];
  }
  return h;
}

inline void check_covers_gust(const GustProfile& gust, const FlightCondition& flight, const SimulationConfig& cfg) {
  const double gust_end = gust.onset_time + gust.gust_length / flight.freestream_velocity;
  if (cfg.final_time < gust_end)
    throw ConfigError("final time " + std::to_string(cfg.final_time) + " s ends before the gust window closes at " +
                      std::to_string(gust_end) + " s");
}

}  // namespace detail

/// Response to an arbitrary force history F(t) sampled on the configured grid.
/// Used for verification against closed-form responses.
inline TimeHistory simulate_forced(const std::function<double(double)>& force, const WingModel& wing,
                                   const SimulationConfig& cfg) {
  wing.validate();
  cfg.validate();
  std::vector<double> f(cfg.step_count());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = force(static_cast<double>(i) * cfg.time_step);
  return detail::assemble_history(detail::newmark(f, wing, cfg), wing, cfg);
}

inline TimeHistory simulate(const GustProfile& gust, const FlightCondition& flight, const WingModel& wing,
                            const SimulationConfig& cfg) {
  gust.validate();
  flight.validate();
  wing.validate();
  cfg.validate();
  detail::check_covers_gust(gust, flight, cfg);
  const double scale = lift_factor(flight, wing);
  std::vector<double> f(cfg.step_count());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = scale * gust_velocity(static_cast<double>(i) * cfg.time_step, gust, flight.freestream_velocity);
  return detail::assemble_history(detail::newmark(f, wing, cfg), wing, cfg);
}

/// Earliest index of the largest tip displacement.
inline std::size_t argmax_tip(const TimeHistory& h) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.tip_displacement.size(); ++i)
    if (h.tip_displacement[i] > h.tip_displacement[best]) best = i;
  return best;
}

/// Signed maximum of the tip displacement and time-average of the strain energy.
inline QoIRecord qois(const TimeHistory& h) {
  if (h.size() == 0) throw ArgumentError("qois of an empty time history");
  QoIRecord r;
  r.max_tip_displacement = h.tip_displacement[argmax_tip(h)];
  r.avg_strain_energy = sample_mean(h.strain_energy);
  return r;
}

struct QoIWithGradient {
  QoIRecord value;
  QoIGradient gradient;  // columns: flight velocity, gust length, gust peak velocity
};

/// QoIs and their derivatives with respect to (V_inf, l_g, V_p).
///
/// Each sensitivity s = dq/dtheta solves m s'' + c s' + k s = dQ/dtheta with
/// zero initial data. The max QoI is differentiated with its argmax frozen at
/// the primal run (earliest index on ties); k does not depend on the uncertain
/// inputs, so d(avg U)/dtheta = mean(k q s).
inline QoIWithGradient simulate_with_gradient(const GustProfile& gust, const FlightCondition& flight,
                                              const WingModel& wing, const SimulationConfig& cfg) {
  const TimeHistory primal = simulate(gust, flight, wing, cfg);
  const std::size_t n = primal.size();
  const double v_inf = flight.freestream_velocity;
  const double l_g = gust.gust_length;
  const double v_p = gust.peak_velocity;
  // Q = C * V_inf * V_g with C independent of the uncertain inputs.
  const double c_lift = 0.5 * flight.air_density * wing.reference_area * wing.lift_curve_slope;
  const double duration = l_g / v_inf;

  std::vector<double> d_vinf(n, 0.0), d_lg(n, 0.0), d_vp(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double elapsed = primal.times[i] - gust.onset_time;
    if (!(elapsed > 0.0 && elapsed < duration)) continue;
    const double phase = 2.0 * std::numbers::pi * elapsed * v_inf / l_g;
    const double shape = 0.5 * (1.0 - std::cos(phase));  // V_g / V_p
    const double dshape_dphase = 0.5 * std::sin(phase);
    const double vg = v_p * shape;
    const double dvg_dvinf = v_p * dshape_dphase * phase / v_inf;
    const double dvg_dlg = -v_p * dshape_dphase * phase / l_g;
    d_vinf[i] = c_lift * (vg + v_inf * dvg_dvinf);
    d_lg[i] = c_lift * v_inf * dvg_dlg;
    d_vp[i] = c_lift * v_inf * shape;
  }

  QoIWithGradient out;
  out.value = qois(primal);
  out.gradient.resize(2, 3);
  const std::size_t t_star = argmax_tip(primal);
  const double k = wing.stiffness();
  const std::vector<double>* forcings[3] = {&d_vinf, &d_lg, &d_vp};
  for (Eigen::Index j = 0; j < 3; ++j) {
    const auto sens = detail::newmark(*forcings[j], wing, cfg);
    out.gradient(0, j) = wing.mode_tip_value * sens.q[t_star];
    std::vector<double> du(n);
    for (std::size_t i = 0; i < n; ++i) du[i] = k * primal.modal_coordinate[i] * sens.q[i];
    out.gradient(1, j) = sample_mean(du);
  }
  return out;
}

inline QoIGradient gradient(const GustProfile& gust, const FlightCondition& flight, const WingModel& wing,
                            const SimulationConfig& cfg) {
  return simulate_with_gradient(gust, flight, wing, cfg).gradient;
}

/// Every gust-model constant that is not an uncertain input.
struct BenchmarkConstants {
  WingModel wing;
  double air_density = 1.225;
  double onset_time = 0.1;
  SimulationConfig simulation;
};

/// The gust benchmark as a model oracle. Inputs are looked up by name
/// (flight_velocity, gust_length, gust_peak_velocity); gradient columns
/// follow the order of the input space.
class GustBenchmark final : public ModelOracle {
 public:
  explicit GustBenchmark(InputSpace space, BenchmarkConstants constants = {})
      : space_(std::move(space)), constants_(constants) {
    const char* names[3] = {"flight_velocity", "gust_length", "gust_peak_velocity"};
    if (space_.dimension() != 3) throw ConfigError("gust benchmark needs exactly three inputs");
    for (std::size_t j = 0; j < 3; ++j) {
      slot_[j] = space_.index_of(names[j]);
      if (slot_[j] == space_.dimension()) throw ConfigError(std::string("gust benchmark input '") + names[j] + "' missing");
    }
    constants_.wing.validate();
    constants_.simulation.validate();
    // Every admissible input must keep the gust inside the simulated window.
    const auto& v = space_[slot_[0]];
    const auto& l = space_[slot_[1]];
    if (!(v.lower > 0.0)) throw ConfigError("flight velocity range must be positive");
    if (constants_.simulation.final_time < constants_.onset_time + l.upper / v.lower)
      throw ConfigError("final time does not cover the longest admissible gust window");
  }

  const InputSpace& space() const noexcept { return space_; }
  const BenchmarkConstants& constants() const noexcept { return constants_; }

  TimeHistory history(std::span<const double> x) const {
    auto [gust, flight] = unpack(x);
    return simulate(gust, flight, constants_.wing, constants_.simulation);
  }

  QoIRecord evaluate(std::span<const double> x) const override { return qois(history(x)); }

  bool has_gradient() const override { return true; }

  QoIGradient gradient(std::span<const double> x) const override { return evaluate_with_gradient(x).gradient; }

  QoIWithGradient evaluate_with_gradient(std::span<const double> x) const {
    auto [gust, flight] = unpack(x);
    auto r = simulate_with_gradient(gust, flight, constants_.wing, constants_.simulation);
    QoIGradient g(2, static_cast<Eigen::Index>(space_.dimension()));
    for (std::size_t j = 0; j < 3; ++j) g.col(static_cast<Eigen::Index>(slot_[j])) = r.gradient.col(static_cast<Eigen::Index>(j));
    r.gradient = g;
    return r;
  }

 private:
  std::pair<GustProfile, FlightCondition> unpack(std::span<const double> x) const {
    if (x.size() != space_.dimension()) throw ArgumentError("point dimension does not match input space");
    GustProfile gust{x[slot_[2]], x[slot_[1]], constants_.onset_time};
    FlightCondition flight{x[slot_[0]], constants_.air_density};
    return {gust, flight};
  }

  InputSpace space_;
  BenchmarkConstants constants_;
  std::size_t slot_[3]{};
};

inline void write_time_history_csv(std::ostream& os, const TimeHistory& h) {
  os << "t,q,qdot,w_tip,U\n";
  char buf[160];
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.17g,%.17g,%.17g,%.17g\n", h.times[i], h.modal_coordinate[i],
                  h.modal_velocity[i], h.tip_displacement[i], h.strain_energy[i]);
    os << buf;
  }
}

}  // namespace gustuq
